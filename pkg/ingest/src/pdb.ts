/** Binding pockets from structure files.
 *
 * Protein residues with any atom within the contact cutoff of a bound
 * ligand (any non-water HETATM residue) form one pocket per ligand.
 * Interaction types come from simple geometric rules: polar atoms within
 * hydrogen-bond range, carbon pairs within hydrophobic range.
 */

import fs from "node:fs";
import path from "node:path";

export const CONTACT_CUTOFF = 4.5;
export const HBOND_CUTOFF = 3.5;
export const HYDROPHOBIC_CUTOFF = 4.0;

const WATER_RESIDUES = new Set(["HOH", "WAT", "DOD"]);

export interface PdbAtom {
  record: "ATOM" | "HETATM";
  name: string;
  resName: string;
  chain: string;
  resSeq: number;
  x: number;
  y: number;
  z: number;
  element: string;
}

export interface PocketRecord {
  pocket_label: string;
  residues: [string, number, string][];
  interaction_types: string[];
  geometry_notes: string | null;
}

export interface ProteinRecord {
  id: string;
  pdb_id: string | null;
  name: string;
  pocket_type: string;
  pockets: PocketRecord[];
  literature: { source_id: string; title: string; abstract: string }[];
}

export class PdbParseError extends Error {}

export function parsePdb(content: string, fileLabel: string): {
  atoms: PdbAtom[];
  pdbId: string | null;
  title: string | null;
} {
  const atoms: PdbAtom[] = [];
  let pdbId: string | null = null;
  const titleParts: string[] = [];
  for (const line of content.split(/\r?\n/)) {
    const record = line.slice(0, 6).trim();
    if (record === "HEADER") {
      const code = line.slice(62, 66).trim();
      if (code) pdbId = code;
    } else if (record === "TITLE") {
      titleParts.push(line.slice(10).trim());
    } else if (record === "ATOM" || record === "HETATM") {
      const x = parseFloat(line.slice(30, 38));
      const y = parseFloat(line.slice(38, 46));
      const z = parseFloat(line.slice(46, 54));
      const resSeq = parseInt(line.slice(22, 26).trim(), 10);
      if ([x, y, z].some(Number.isNaN) || Number.isNaN(resSeq)) {
        throw new PdbParseError(`${fileLabel}: malformed coordinate record: ${line.trim()}`);
      }
      const name = line.slice(12, 16).trim();
      atoms.push({
        record: record as "ATOM" | "HETATM",
        name,
        resName: line.slice(17, 20).trim(),
        chain: line.slice(21, 22).trim() || "A",
        resSeq,
        x,
        y,
        z,
        element: (line.slice(76, 78).trim() || name.replace(/[^A-Za-z]/g, "").slice(0, 1)).toUpperCase(),
      });
    }
  }
  if (!atoms.length) {
    throw new PdbParseError(`${fileLabel}: no ATOM/HETATM records found`);
  }
  return { atoms, pdbId, title: titleParts.length ? titleParts.join(" ") : null };
}

function distance(a: PdbAtom, b: PdbAtom): number {
  return Math.sqrt((a.x - b.x) ** 2 + (a.y - b.y) ** 2 + (a.z - b.z) ** 2);
}

const POLAR = new Set(["N", "O"]);

export function extractPockets(atoms: PdbAtom[]): PocketRecord[] {
  const proteinAtoms = atoms.filter((a) => a.record === "ATOM");
  const ligands = new Map<string, PdbAtom[]>();
  for (const atom of atoms) {
    if (atom.record !== "HETATM" || WATER_RESIDUES.has(atom.resName)) continue;
    const key = `${atom.resName}_${atom.chain}${atom.resSeq}`;
    ligands.set(key, [...(ligands.get(key) ?? []), atom]);
  }

  const pockets: PocketRecord[] = [];
  for (const [label, ligandAtoms] of [...ligands.entries()].sort()) {
    const residueKeys = new Map<string, [string, number, string]>();
    const types = new Set<string>();
    for (const proteinAtom of proteinAtoms) {
      for (const ligandAtom of ligandAtoms) {
        const d = distance(proteinAtom, ligandAtom);
        if (d > CONTACT_CUTOFF) continue;
        const key = `${proteinAtom.chain}:${proteinAtom.resSeq}:${proteinAtom.resName}`;
        residueKeys.set(key, [proteinAtom.resName, proteinAtom.resSeq, proteinAtom.chain]);
        if (d <= HBOND_CUTOFF && POLAR.has(proteinAtom.element) && POLAR.has(ligandAtom.element)) {
          types.add("hydrogen-bond");
        }
        if (d <= HYDROPHOBIC_CUTOFF && proteinAtom.element === "C" && ligandAtom.element === "C") {
          types.add("hydrophobic");
        }
      }
    }
    if (!residueKeys.size) continue; // ligand floats free of the chain
    const residues = [...residueKeys.values()].sort(
      (a, b) => a[2].localeCompare(b[2]) || a[1] - b[1],
    );
    pockets.push({
      pocket_label: label,
      residues,
      interaction_types: [...types].sort(),
      geometry_notes: `contacts within ${CONTACT_CUTOFF} A of ${label}`,
    });
  }
  return pockets;
}

export function proteinRecordFromFile(filePath: string): ProteinRecord {
  let content: string;
  try {
    content = fs.readFileSync(filePath, "utf-8");
  } catch (error) {
    throw new PdbParseError(`${filePath}: unreadable file (${(error as Error).message})`);
  }
  const stem = path.basename(filePath).replace(/\.(pdb|ent)$/i, "");
  const { atoms, pdbId, title } = parsePdb(content, filePath);
  const pockets = extractPockets(atoms);
  return {
    id: stem,
    pdb_id: pdbId,
    name: title ?? stem,
    pocket_type: pockets.length ? pockets[0].pocket_label.split("_")[0] : "apo",
    pockets,
    literature: [],
  };
}
