/** Circular (neighborhood-hash) fingerprints, radius 2, default 2048 bits.
 *
 * Atom environments are hashed iteratively from per-atom invariants and
 * sorted (bond, neighbor-hash) pairs, then folded into a fixed-width
 * bitvector. Hashing is FNV-1a over 32-bit words, so the same SMILES
 * yields the same hex string on every platform. Bit 0 maps to the most
 * significant bit of the hex form, matching the corpus convention.
 */

import { ATOMIC_NUMBERS } from "./elements.js";
import { Mol, heavyDegree, neighbors } from "./mol.js";

export const DEFAULT_N_BITS = 2048;
export const DEFAULT_RADIUS = 2;

function fnv1a(values: number[]): number {
  let hash = 0x811c9dc5;
  for (const value of values) {
    let word = value >>> 0;
    for (let i = 0; i < 4; i++) {
      hash ^= word & 0xff;
      hash = Math.imul(hash, 0x01000193) >>> 0;
      word >>>= 8;
    }
  }
  return hash >>> 0;
}

function bondCode(order: number): number {
  return Math.round(order * 10); // 10, 15, 20, 30
}

export function circularFingerprintBits(
  mol: Mol,
  radius: number = DEFAULT_RADIUS,
  nBits: number = DEFAULT_N_BITS,
): Set<number> {
  let current = mol.atoms.map((atom) =>
    fnv1a([
      ATOMIC_NUMBERS[atom.element] ?? 0,
      heavyDegree(mol, atom.index),
      atom.hydrogens,
      atom.charge + 8,
      atom.inRing ? 1 : 0,
      atom.aromatic ? 1 : 0,
    ]),
  );
  const bits = new Set<number>();
  for (const hash of current) bits.add(hash % nBits);

  for (let round = 1; round <= radius; round++) {
    const next = current.slice();
    for (const atom of mol.atoms) {
      const pairs = neighbors(mol, atom.index)
        .map((n) => [bondCode(n.bond.order), current[n.atom.index]])
        .sort((x, y) => x[0] - y[0] || x[1] - y[1]);
      next[atom.index] = fnv1a([round, current[atom.index], ...pairs.flat()]);
      bits.add(next[atom.index] % nBits);
    }
    current = next;
  }
  return bits;
}

export function bitsToHex(bits: Set<number>, nBits: number = DEFAULT_N_BITS): string {
  if (nBits % 8 !== 0) throw new Error("nBits must be a multiple of 8");
  const bytes = new Uint8Array(nBits / 8);
  for (const bit of bits) {
    if (bit < 0 || bit >= nBits) throw new Error(`bit index ${bit} out of range`);
    bytes[bit >> 3] |= 0x80 >> (bit & 7);
  }
  return [...bytes].map((b) => b.toString(16).padStart(2, "0")).join("");
}

export function fingerprintHex(
  mol: Mol,
  radius: number = DEFAULT_RADIUS,
  nBits: number = DEFAULT_N_BITS,
): string {
  return bitsToHex(circularFingerprintBits(mol, radius, nBits), nBits);
}
