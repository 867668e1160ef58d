/** A SMILES reader covering the drug-like subset this toolkit ingests:
 * organic-subset atoms, bracket atoms (isotope, chirality, H count,
 * charge), aromatic lowercase forms, branches, ring closures (including
 * %nn), and bond symbols - = # : / \. Directional bonds are kept as
 * single bonds; isotopes are parsed and dropped. */

import { ATOMIC_WEIGHTS, DEFAULT_VALENCES, ORGANIC_SUBSET } from "./elements.js";
import { Atom, Bond, Mol, markRings } from "./mol.js";

export class SmilesParseError extends Error {}

const TWO_LETTER = ["Cl", "Br"];
const AROMATIC_ORGANIC = new Set(["b", "c", "n", "o", "p", "s"]);

interface OpenRing {
  atom: number;
  order: number | null;
  aromaticBond: boolean;
}

export function parseSmiles(smiles: string): Mol {
  if (!smiles || !smiles.trim()) throw new SmilesParseError("empty SMILES");
  const text = smiles.trim();
  const atoms: Atom[] = [];
  const bonds: Bond[] = [];
  const stack: number[] = [];
  const openRings = new Map<string, OpenRing>();

  let previous: number | null = null;
  let pendingOrder: number | null = null;
  let position = 0;

  const fail = (message: string): never => {
    throw new SmilesParseError(`${message} at position ${position} in ${JSON.stringify(text)}`);
  };

  const addAtom = (element: string, aromatic: boolean, charge: number, hydrogens: number | null, chirality: string | null): number => {
    if (!(element in ATOMIC_WEIGHTS)) fail(`unknown element ${element}`);
    const atom: Atom = {
      index: atoms.length,
      element,
      aromatic,
      charge,
      hydrogens: hydrogens ?? -1, // -1: fill from valence rules afterwards
      chirality,
      inRing: false,
    };
    atoms.push(atom);
    if (previous !== null) {
      const aromaticBond = pendingOrder === null && atoms[previous].aromatic && aromatic;
      bonds.push({
        a: previous,
        b: atom.index,
        order: pendingOrder ?? (aromaticBond ? 1.5 : 1),
        aromatic: aromaticBond || pendingOrder === 1.5,
        inRing: false,
      });
    }
    previous = atom.index;
    pendingOrder = null;
    return atom.index;
  };

  const closeRing = (label: string) => {
    const open = openRings.get(label);
    if (previous === null) fail(`ring closure ${label} before any atom`);
    if (!open) {
      openRings.set(label, {
        atom: previous!,
        order: pendingOrder,
        aromaticBond: pendingOrder === 1.5,
      });
      pendingOrder = null;
      return;
    }
    openRings.delete(label);
    const order = open.order ?? pendingOrder;
    const bothAromatic = atoms[open.atom].aromatic && atoms[previous!].aromatic;
    const aromaticBond = order === 1.5 || (order === null && bothAromatic);
    bonds.push({
      a: open.atom,
      b: previous!,
      order: order ?? (aromaticBond ? 1.5 : 1),
      aromatic: aromaticBond,
      inRing: true,
    });
    pendingOrder = null;
  };

  while (position < text.length) {
    const ch = text[position];
    if (ch === "(") {
      if (previous === null) fail("branch before any atom");
      stack.push(previous!);
      position += 1;
    } else if (ch === ")") {
      if (!stack.length) fail("unmatched ')'");
      previous = stack.pop()!;
      position += 1;
    } else if (ch === "-" || ch === "/" || ch === "\\") {
      pendingOrder = 1;
      position += 1;
    } else if (ch === "=") {
      pendingOrder = 2;
      position += 1;
    } else if (ch === "#") {
      pendingOrder = 3;
      position += 1;
    } else if (ch === ":") {
      pendingOrder = 1.5;
      position += 1;
    } else if (ch === "%") {
      const label = text.slice(position + 1, position + 3);
      if (!/^\d\d$/.test(label)) fail("bad %nn ring label");
      closeRing(label);
      position += 3;
    } else if (/\d/.test(ch)) {
      closeRing(ch);
      position += 1;
    } else if (ch === "[") {
      const end = text.indexOf("]", position);
      if (end < 0) fail("unterminated bracket atom");
      parseBracket(text.slice(position + 1, end), addAtom, fail);
      position = end + 1;
    } else if (ch === ".") {
      // Disconnected component separator; keep parsing with no bond.
      previous = null;
      pendingOrder = null;
      position += 1;
    } else {
      const two = text.slice(position, position + 2);
      if (TWO_LETTER.includes(two)) {
        addAtom(two, false, 0, null, null);
        position += 2;
      } else if (ORGANIC_SUBSET.has(ch)) {
        addAtom(ch, false, 0, null, null);
        position += 1;
      } else if (AROMATIC_ORGANIC.has(ch)) {
        addAtom(ch.toUpperCase(), true, 0, null, null);
        position += 1;
      } else {
        fail(`unexpected character ${JSON.stringify(ch)}`);
      }
    }
  }
  if (stack.length) fail("unmatched '('");
  if (openRings.size) fail(`unclosed ring labels: ${[...openRings.keys()].join(", ")}`);

  const mol: Mol = { atoms, bonds };
  fillImplicitHydrogens(mol);
  markRings(mol);
  return mol;
}

function parseBracket(
  body: string,
  addAtom: (element: string, aromatic: boolean, charge: number, hydrogens: number | null, chirality: string | null) => number,
  fail: (message: string) => never,
) {
  const match = body.match(
    /^(\d+)?([A-Z][a-z]?|[bcnops])(@@|@)?(H\d*)?((?:\+\d*|-\d*|\++|-+))?(?::\d+)?$/,
  );
  if (!match) fail(`bad bracket atom [${body}]`);
  const [, , rawElement, chirality, hPart, chargePart] = match!;
  const aromatic = rawElement === rawElement.toLowerCase();
  const element = aromatic
    ? rawElement.toUpperCase()
    : rawElement;
  let hydrogens = 0;
  if (hPart) hydrogens = hPart === "H" ? 1 : parseInt(hPart.slice(1), 10);
  let charge = 0;
  if (chargePart) {
    if (/^\+\d+$/.test(chargePart)) charge = parseInt(chargePart.slice(1), 10);
    else if (/^-\d+$/.test(chargePart)) charge = -parseInt(chargePart.slice(1), 10);
    else charge = chargePart.startsWith("+") ? chargePart.length : -chargePart.length;
  }
  addAtom(element, aromatic, charge, hydrogens, chirality ?? null);
}

/** Fill hydrogens on organic-subset atoms from the smallest standard
 * valence that covers the bond-order sum; bracket atoms keep their
 * explicit count. Aromatic bonds count 1.5 and the sum is ceiled, which
 * reproduces the usual aromatic hydrogen counts. */
function fillImplicitHydrogens(mol: Mol): void {
  const orderSums = new Array(mol.atoms.length).fill(0);
  for (const bond of mol.bonds) {
    orderSums[bond.a] += bond.order;
    orderSums[bond.b] += bond.order;
  }
  for (const atom of mol.atoms) {
    if (atom.hydrogens >= 0) continue; // bracket atom: verbatim count
    const valences = DEFAULT_VALENCES[atom.element];
    if (!valences) {
      atom.hydrogens = 0;
      continue;
    }
    const bondSum = Math.ceil(orderSums[atom.index]);
    let filled = 0;
    for (const valence of valences) {
      const target = valence + atom.charge;
      if (target >= bondSum) {
        filled = target - bondSum;
        break;
      }
    }
    atom.hydrogens = Math.max(0, filled);
  }
}

export function molecularFormulaWeight(mol: Mol): number {
  let weight = 0;
  for (const atom of mol.atoms) {
    weight += ATOMIC_WEIGHTS[atom.element];
    weight += atom.hydrogens * ATOMIC_WEIGHTS.H;
  }
  return weight;
}
