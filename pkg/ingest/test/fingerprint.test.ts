import { describe, expect, it } from "vitest";

import { bitsToHex, circularFingerprintBits, fingerprintHex } from "../src/fingerprint.js";
import { parseSmiles } from "../src/smiles.js";

describe("circular fingerprint", () => {
  it("is deterministic for the same SMILES", () => {
    const first = fingerprintHex(parseSmiles("CC(=O)Oc1ccccc1C(=O)O"));
    const second = fingerprintHex(parseSmiles("CC(=O)Oc1ccccc1C(=O)O"));
    expect(first).toBe(second);
    expect(first).toHaveLength(2048 / 4);
    expect(first).toMatch(/^[0-9a-f]+$/);
  });

  it("differs between unrelated molecules", () => {
    expect(fingerprintHex(parseSmiles("CCO"))).not.toBe(fingerprintHex(parseSmiles("c1ccccc1")));
  });

  it("shares bits between close analogues", () => {
    const a = circularFingerprintBits(parseSmiles("CCO"));
    const b = circularFingerprintBits(parseSmiles("CCCO"));
    const shared = [...a].filter((bit) => b.has(bit));
    expect(shared.length).toBeGreaterThan(0);
  });

  it("encodes bit 0 as the most significant nibble", () => {
    const hex = bitsToHex(new Set([0]), 16);
    expect(hex).toBe("8000");
    expect(bitsToHex(new Set([15]), 16)).toBe("0001");
  });

  it("respects custom widths", () => {
    const hex = fingerprintHex(parseSmiles("CCO"), 2, 512);
    expect(hex).toHaveLength(512 / 4);
  });
});
