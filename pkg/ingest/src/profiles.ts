/** Molecule-record assembly: SMILES in, corpus-schema records out. */

import { physchemProfile } from "./descriptors.js";
import { DEFAULT_N_BITS, DEFAULT_RADIUS, fingerprintHex } from "./fingerprint.js";
import { parseSmiles, SmilesParseError } from "./smiles.js";
import { structuralProfile } from "./structural.js";

export interface MoleculeRecord {
  id: string;
  smiles: string;
  fingerprint: { n_bits: number; hex: string } | null;
  embedding: number[] | null;
  structural: {
    chiral_center_count: number;
    scaffold: string;
    functional_groups: string[];
  };
  physchem: {
    molecular_weight: number;
    logp: number;
    psa: number;
    hbd: number;
    hba: number;
    rotatable_bonds: number;
    heavy_atoms: number;
  };
}

export interface SkippedEntry {
  id: string;
  smiles: string;
  reason: string;
}

export interface ExtractOptions {
  nBits?: number;
  radius?: number;
}

export function moleculeRecord(id: string, smiles: string, options: ExtractOptions = {}): MoleculeRecord {
  const nBits = options.nBits ?? DEFAULT_N_BITS;
  const radius = options.radius ?? DEFAULT_RADIUS;
  const mol = parseSmiles(smiles);
  return {
    id,
    smiles,
    fingerprint: { n_bits: nBits, hex: fingerprintHex(mol, radius, nBits) },
    embedding: null, // embeddings are attached by a separate, heavier pipeline
    structural: structuralProfile(mol),
    physchem: physchemProfile(mol),
  };
}

/** Build records for (id, smiles) entries; unparseable inputs are skipped,
 * duplicate SMILES keep their first record only. */
export function extractMoleculeProfiles(
  entries: { id: string; smiles: string }[],
  options: ExtractOptions = {},
): { records: MoleculeRecord[]; skipped: SkippedEntry[] } {
  const records: MoleculeRecord[] = [];
  const skipped: SkippedEntry[] = [];
  const seenSmiles = new Map<string, string>();
  const seenIds = new Set<string>();
  for (const entry of entries) {
    if (seenSmiles.has(entry.smiles)) {
      skipped.push({
        ...entry,
        reason: `duplicate of ${seenSmiles.get(entry.smiles)}`,
      });
      continue;
    }
    if (seenIds.has(entry.id)) {
      skipped.push({ ...entry, reason: "duplicate id" });
      continue;
    }
    try {
      records.push(moleculeRecord(entry.id, entry.smiles, options));
      seenSmiles.set(entry.smiles, entry.id);
      seenIds.add(entry.id);
    } catch (error) {
      if (error instanceof SmilesParseError) {
        skipped.push({ ...entry, reason: error.message });
      } else {
        throw error;
      }
    }
  }
  if (entries.length > 0 && records.length === 0) {
    throw new Error("every input SMILES failed to parse");
  }
  return { records, skipped };
}
