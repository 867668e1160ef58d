/** Structural profile: chiral centers, ring scaffold, functional groups.
 *
 * The scaffold is the ring systems plus their connecting linkers (terminal
 * atoms pruned repeatedly), written as a deterministic SMILES; acyclic
 * molecules get an empty scaffold. The writer is deterministic for a given
 * input but not canonical across differently-written inputs.
 */

import { Mol, neighbors } from "./mol.js";
import { ORGANIC_SUBSET } from "./elements.js";

export interface Structural {
  chiral_center_count: number;
  scaffold: string;
  functional_groups: string[];
}

export function chiralCenterCount(mol: Mol): number {
  return mol.atoms.filter((a) => a.chirality !== null).length;
}

// ---------------------------------------------------------------------------
// Scaffold
// ---------------------------------------------------------------------------

export function scaffoldSmiles(mol: Mol): string {
  if (!mol.atoms.some((a) => a.inRing)) return "";
  const kept = new Set(mol.atoms.map((a) => a.index));
  let changed = true;
  while (changed) {
    changed = false;
    for (const atom of mol.atoms) {
      if (!kept.has(atom.index) || atom.inRing) continue;
      const degree = neighbors(mol, atom.index).filter((n) => kept.has(n.atom.index)).length;
      if (degree <= 1) {
        kept.delete(atom.index);
        changed = true;
      }
    }
  }
  return writeSubgraphSmiles(mol, kept);
}

function atomToken(mol: Mol, index: number): string {
  const atom = mol.atoms[index];
  let symbol = atom.aromatic ? atom.element.toLowerCase() : atom.element;
  const needsBracket =
    atom.charge !== 0 ||
    !ORGANIC_SUBSET.has(atom.element) ||
    (atom.aromatic && atom.element === "N" && atom.hydrogens > 0);
  if (!needsBracket) return symbol;
  let body = symbol;
  if (atom.aromatic && atom.element === "N" && atom.hydrogens > 0) body += "H";
  if (atom.charge > 0) body += atom.charge === 1 ? "+" : `+${atom.charge}`;
  if (atom.charge < 0) body += atom.charge === -1 ? "-" : `-${-atom.charge}`;
  return `[${body}]`;
}

function bondToken(order: number, aromatic: boolean): string {
  if (aromatic) return "";
  if (order === 2) return "=";
  if (order === 3) return "#";
  return "";
}

function writeSubgraphSmiles(mol: Mol, kept: Set<number>): string {
  const adjacency = new Map<number, { to: number; order: number; aromatic: boolean }[]>();
  for (const index of kept) adjacency.set(index, []);
  for (const bond of mol.bonds) {
    if (!kept.has(bond.a) || !kept.has(bond.b)) continue;
    adjacency.get(bond.a)!.push({ to: bond.b, order: bond.order, aromatic: bond.aromatic });
    adjacency.get(bond.b)!.push({ to: bond.a, order: bond.order, aromatic: bond.aromatic });
  }
  for (const edges of adjacency.values()) edges.sort((x, y) => x.to - y.to);

  const visited = new Set<number>();
  const ringLabels = new Map<string, number>();
  let nextLabel = 1;
  const pieces: string[] = [];

  const edgeKey = (a: number, b: number) => (a < b ? `${a}-${b}` : `${b}-${a}`);
  const ringBonds = new Map<number, string[]>();

  // First pass: depth-first tree; the non-tree edges become ring closures.
  const seen = new Set<number>();
  const roots = [...kept].sort((a, b) => a - b);
  const treeEdges = new Set<string>();
  const walk = (current: number) => {
    seen.add(current);
    for (const edge of adjacency.get(current)!) {
      if (!seen.has(edge.to)) {
        treeEdges.add(edgeKey(current, edge.to));
        walk(edge.to);
      }
    }
  };
  for (const root of roots) {
    if (!seen.has(root)) walk(root);
  }
  const backEdges = new Set<string>();
  for (const [a, edges] of adjacency) {
    for (const edge of edges) {
      const key = edgeKey(a, edge.to);
      if (!treeEdges.has(key)) backEdges.add(key);
    }
  }
  for (const key of [...backEdges].sort()) {
    const label = nextLabel++;
    const token = label < 10 ? String(label) : `%${String(label).padStart(2, "0")}`;
    ringLabels.set(key, label);
    const [a, b] = key.split("-").map(Number);
    ringBonds.set(a, [...(ringBonds.get(a) ?? []), token]);
    ringBonds.set(b, [...(ringBonds.get(b) ?? []), token]);
  }

  // Second pass: emit SMILES along the DFS tree.
  const emit = (current: number, from: number | null): string => {
    visited.add(current);
    let out = "";
    if (from !== null) {
      const edge = adjacency.get(current)!.find((e) => e.to === from)!;
      out += bondToken(edge.order, edge.aromatic);
    }
    out += atomToken(mol, current);
    for (const token of ringBonds.get(current) ?? []) out += token;
    const children = adjacency
      .get(current)!
      .filter((e) => !visited.has(e.to) && treeEdges.has(edgeKey(current, e.to)))
      .sort((x, y) => x.to - y.to);
    children.forEach((edge, i) => {
      const branch = emit(edge.to, current);
      out += i < children.length - 1 ? `(${branch})` : branch;
    });
    return out;
  };

  for (const root of roots) {
    if (visited.has(root)) continue;
    pieces.push(emit(root, null));
  }
  return pieces.join(".");
}

// ---------------------------------------------------------------------------
// Functional groups
// ---------------------------------------------------------------------------

export function functionalGroups(mol: Mol): string[] {
  const groups = new Set<string>();
  const atomNeighbors = (i: number) => neighbors(mol, i);

  for (const atom of mol.atoms) {
    if (atom.element === "C" && !atom.aromatic) {
      const ns = atomNeighbors(atom.index);
      const doubleO = ns.filter((n) => n.atom.element === "O" && n.bond.order === 2);
      const singleO = ns.filter((n) => n.atom.element === "O" && n.bond.order === 1);
      const singleN = ns.filter((n) => n.atom.element === "N" && n.bond.order === 1);
      const carbons = ns.filter((n) => n.atom.element === "C");
      if (doubleO.length === 1) {
        const hydroxylO = singleO.find((n) => n.atom.hydrogens > 0);
        const etherO = singleO.find((n) => n.atom.hydrogens === 0);
        if (hydroxylO) groups.add("carboxylic acid");
        else if (etherO) groups.add("ester");
        else if (singleN.length) groups.add("amide");
        else if (carbons.length === 2) groups.add("ketone");
        else if (atom.hydrogens > 0) groups.add("aldehyde");
      }
      if (ns.some((n) => n.atom.element === "N" && n.bond.order === 3)) groups.add("nitrile");
    }
    if (atom.element === "O" && atom.hydrogens > 0 && !atom.aromatic) {
      const carbonNeighbor = atomNeighbors(atom.index).find(
        (n) => n.atom.element === "C" && n.bond.order === 1,
      );
      if (carbonNeighbor) {
        const carbonyl = neighbors(mol, carbonNeighbor.atom.index).some(
          (n) => n.atom.element === "O" && n.bond.order === 2,
        );
        if (!carbonyl) groups.add(carbonNeighbor.atom.aromatic ? "phenol" : "hydroxyl");
      }
    }
    if (atom.element === "O" && atom.hydrogens === 0 && !atom.aromatic) {
      const ns = atomNeighbors(atom.index);
      if (
        ns.length === 2 &&
        ns.every((n) => n.atom.element === "C" && n.bond.order === 1) &&
        !ns.some((n) =>
          neighbors(mol, n.atom.index).some(
            (m) => m.atom.element === "O" && m.bond.order === 2,
          ),
        )
      ) {
        groups.add("ether");
      }
    }
    if (atom.element === "N" && !atom.aromatic) {
      const ns = atomNeighbors(atom.index);
      const amide = ns.some(
        (n) =>
          n.atom.element === "C" &&
          neighbors(mol, n.atom.index).some(
            (m) => m.atom.element === "O" && m.bond.order === 2,
          ),
      );
      const nitro = ns.filter((n) => n.atom.element === "O").length >= 2;
      if (nitro) groups.add("nitro");
      else if (!amide && ns.every((n) => n.bond.order === 1) && ns.length > 0) groups.add("amine");
    }
    if (["F", "Cl", "Br", "I"].includes(atom.element)) groups.add("halide");
    if (atom.element === "S") {
      groups.add(atom.hydrogens > 0 ? "thiol" : "thioether");
    }
    if (atom.aromatic) groups.add("aromatic ring");
  }
  return [...groups].sort();
}

export function structuralProfile(mol: Mol): Structural {
  return {
    chiral_center_count: chiralCenterCount(mol),
    scaffold: scaffoldSmiles(mol),
    functional_groups: functionalGroups(mol),
  };
}
