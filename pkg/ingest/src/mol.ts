/** Molecular graph types shared by the parser and the descriptor code. */

export interface Atom {
  index: number;
  element: string;
  aromatic: boolean;
  charge: number;
  /** Hydrogens: computed from valence rules, or taken verbatim from brackets. */
  hydrogens: number;
  /** '@' | '@@' | null; set only when the input marks the center. */
  chirality: string | null;
  inRing: boolean;
}

export interface Bond {
  a: number;
  b: number;
  /** 1, 2, 3; aromatic bonds carry 1.5. */
  order: number;
  aromatic: boolean;
  inRing: boolean;
}

export interface Mol {
  atoms: Atom[];
  bonds: Bond[];
}

export function neighbors(mol: Mol, index: number): { atom: Atom; bond: Bond }[] {
  const result: { atom: Atom; bond: Bond }[] = [];
  for (const bond of mol.bonds) {
    if (bond.a === index) result.push({ atom: mol.atoms[bond.b], bond });
    else if (bond.b === index) result.push({ atom: mol.atoms[bond.a], bond });
  }
  return result;
}

export function heavyDegree(mol: Mol, index: number): number {
  return neighbors(mol, index).filter((n) => n.atom.element !== "H").length;
}

/** Ring membership via bond-removal reachability: a bond is in a ring iff
 * its endpoints stay connected without it. Fine at corpus-prep scale. */
export function markRings(mol: Mol): void {
  const adjacency = new Map<number, Set<number>>();
  for (const atom of mol.atoms) adjacency.set(atom.index, new Set());
  for (const bond of mol.bonds) {
    adjacency.get(bond.a)!.add(bond.b);
    adjacency.get(bond.b)!.add(bond.a);
  }
  for (const bond of mol.bonds) {
    bond.inRing = reachable(adjacency, bond.a, bond.b, bond);
    if (bond.inRing) {
      mol.atoms[bond.a].inRing = true;
      mol.atoms[bond.b].inRing = true;
    }
  }
}

function reachable(
  adjacency: Map<number, Set<number>>,
  start: number,
  goal: number,
  skip: Bond,
): boolean {
  const seen = new Set<number>([start]);
  const stack = [start];
  while (stack.length) {
    const current = stack.pop()!;
    for (const next of adjacency.get(current)!) {
      if (current === skip.a && next === skip.b) continue;
      if (current === skip.b && next === skip.a) continue;
      if (next === goal) return true;
      if (!seen.has(next)) {
        seen.add(next);
        stack.push(next);
      }
    }
  }
  return false;
}
