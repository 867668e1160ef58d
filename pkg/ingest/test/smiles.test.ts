import { describe, expect, it } from "vitest";

import { parseSmiles, SmilesParseError } from "../src/smiles.js";

describe("parseSmiles", () => {
  it("reads ethanol", () => {
    const mol = parseSmiles("CCO");
    expect(mol.atoms.map((a) => a.element)).toEqual(["C", "C", "O"]);
    expect(mol.atoms.map((a) => a.hydrogens)).toEqual([3, 2, 1]);
    expect(mol.bonds).toHaveLength(2);
  });

  it("computes aromatic hydrogen counts", () => {
    const benzene = parseSmiles("c1ccccc1");
    expect(benzene.atoms.every((a) => a.aromatic)).toBe(true);
    expect(benzene.atoms.every((a) => a.hydrogens === 1)).toBe(true);
    expect(benzene.bonds.every((b) => b.inRing)).toBe(true);

    const pyridine = parseSmiles("c1ccncc1");
    const nitrogen = pyridine.atoms.find((a) => a.element === "N")!;
    expect(nitrogen.hydrogens).toBe(0);
  });

  it("honors bracket hydrogen and charge", () => {
    const mol = parseSmiles("C[N+](C)(C)C");
    const nitrogen = mol.atoms.find((a) => a.element === "N")!;
    expect(nitrogen.charge).toBe(1);
    expect(nitrogen.hydrogens).toBe(0);

    const pyrrole = parseSmiles("c1cc[nH]c1");
    const nh = pyrrole.atoms.find((a) => a.element === "N")!;
    expect(nh.hydrogens).toBe(1);
    expect(nh.aromatic).toBe(true);
  });

  it("counts chiral marks", () => {
    const mol = parseSmiles("C[C@H](N)C(=O)O");
    expect(mol.atoms.filter((a) => a.chirality !== null)).toHaveLength(1);
  });

  it("handles branches, ring labels, and double bonds", () => {
    const mol = parseSmiles("CC(=O)Oc1ccccc1C(=O)O");
    expect(mol.atoms).toHaveLength(13);
    expect(mol.bonds.filter((b) => b.order === 2)).toHaveLength(2);
    const naphthalene = parseSmiles("c1ccc2ccccc2c1");
    expect(naphthalene.atoms).toHaveLength(10);
    expect(parseSmiles("C%10CCCC%10").atoms).toHaveLength(5);
  });

  it("rejects malformed input with position info", () => {
    expect(() => parseSmiles("C((")).toThrow(SmilesParseError);
    expect(() => parseSmiles("C1CC")).toThrow(/unclosed ring/);
    expect(() => parseSmiles("C[Xx]")).toThrow(SmilesParseError);
    expect(() => parseSmiles("")).toThrow(/empty/);
  });
});
