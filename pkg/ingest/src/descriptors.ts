/** Physicochemical descriptors over the parsed molecular graph.
 *
 * Polar surface area follows the published group-contribution scheme for
 * nitrogen and oxygen environments (the classic variant that ignores S/P).
 * logP is a coarse per-atom additive estimate, good enough to rank corpus
 * molecules; it is not a calibrated octanol-water model.
 */

import { Mol, heavyDegree, neighbors } from "./mol.js";
import { molecularFormulaWeight } from "./smiles.js";

export interface Physchem {
  molecular_weight: number;
  logp: number;
  psa: number;
  hbd: number;
  hba: number;
  rotatable_bonds: number;
  heavy_atoms: number;
}

export function heavyAtomCount(mol: Mol): number {
  return mol.atoms.filter((a) => a.element !== "H").length;
}

export function hydrogenBondDonors(mol: Mol): number {
  return mol.atoms.filter(
    (a) => (a.element === "N" || a.element === "O") && a.hydrogens > 0,
  ).length;
}

/** Lipinski-style acceptor count: every nitrogen and oxygen. */
export function hydrogenBondAcceptors(mol: Mol): number {
  return mol.atoms.filter((a) => a.element === "N" || a.element === "O").length;
}

export function rotatableBondCount(mol: Mol): number {
  let count = 0;
  for (const bond of mol.bonds) {
    if (bond.order !== 1 || bond.aromatic || bond.inRing) continue;
    if (heavyDegree(mol, bond.a) < 2 || heavyDegree(mol, bond.b) < 2) continue;
    if (isAmideBond(mol, bond.a, bond.b) || isAmideBond(mol, bond.b, bond.a)) continue;
    count += 1;
  }
  return count;
}

function isAmideBond(mol: Mol, carbon: number, nitrogen: number): boolean {
  if (mol.atoms[carbon].element !== "C" || mol.atoms[nitrogen].element !== "N") return false;
  return neighbors(mol, carbon).some(
    (n) => n.atom.element === "O" && n.bond.order === 2,
  );
}

export function polarSurfaceArea(mol: Mol): number {
  let psa = 0;
  for (const atom of mol.atoms) {
    if (atom.element !== "N" && atom.element !== "O") continue;
    const bonds = neighbors(mol, atom.index).map((n) => n.bond.order);
    const doubles = bonds.filter((o) => o === 2).length;
    const triples = bonds.filter((o) => o === 3).length;
    const h = atom.hydrogens;
    if (atom.element === "O") {
      if (atom.charge < 0) psa += 23.06;
      else if (atom.aromatic) psa += 13.14;
      else if (doubles >= 1) psa += 17.07;
      else if (h >= 1) psa += 20.23;
      else psa += 9.23;
    } else {
      if (atom.aromatic) {
        if (atom.charge > 0) psa += h >= 1 ? 14.14 : 4.1;
        else if (h >= 1) psa += 15.79;
        else if (heavyDegree(mol, atom.index) === 3) psa += 4.93;
        else psa += 12.89;
      } else if (atom.charge > 0) {
        psa += [0.0, 4.44, 16.61, 27.64][Math.min(h, 3)];
      } else if (triples >= 1) {
        psa += 23.79;
      } else if (doubles >= 1) {
        psa += h >= 1 ? 23.85 : 12.36;
      } else {
        psa += [3.24, 12.03, 26.02][Math.min(h, 2)];
      }
    }
  }
  return round2(psa);
}

const LOGP_CONTRIBUTIONS: Record<string, number> = {
  C: 0.14,
  N: -0.6,
  O: -0.4,
  S: 0.25,
  P: -0.45,
  F: 0.22,
  Cl: 0.65,
  Br: 0.86,
  I: 1.12,
  B: 0.1,
};

export function estimateLogP(mol: Mol): number {
  let logp = 0;
  for (const atom of mol.atoms) {
    if (atom.element === "C") logp += atom.aromatic ? 0.29 : 0.14;
    else if (atom.element === "N") logp += atom.aromatic ? -0.26 : -0.6;
    else logp += LOGP_CONTRIBUTIONS[atom.element] ?? 0;
    logp -= Math.abs(atom.charge) * 1.0;
  }
  return round2(logp);
}

export function physchemProfile(mol: Mol): Physchem {
  return {
    molecular_weight: round2(molecularFormulaWeight(mol)),
    logp: estimateLogP(mol),
    psa: polarSurfaceArea(mol),
    hbd: hydrogenBondDonors(mol),
    hba: hydrogenBondAcceptors(mol),
    rotatable_bonds: rotatableBondCount(mol),
    heavy_atoms: heavyAtomCount(mol),
  };
}

function round2(value: number): number {
  return Math.round(value * 100) / 100;
}
