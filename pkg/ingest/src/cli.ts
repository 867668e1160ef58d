/** CLI entry: extract-molecules | extract-pockets | fetch-literature.
 *
 * Outputs are exactly the corpus JSONL schemas the engine validates, so a
 * typical flow is:
 *
 *   node dist/cli.js extract-molecules --in smiles.txt --out molecules.jsonl
 *   node dist/cli.js extract-pockets --in structures/ --out proteins.jsonl
 *   node dist/cli.js fetch-literature --in proteins.jsonl --out proteins.jsonl \
 *       --budget 2 --offline snapshot.json
 */

import fs from "node:fs";
import path from "node:path";
import { parseArgs } from "node:util";

import { fetchLiterature } from "./literature.js";
import { extractMoleculeProfiles } from "./profiles.js";
import { proteinRecordFromFile, ProteinRecord } from "./pdb.js";
import { readJsonl, readLines, writeJsonl } from "./jsonl.js";

function usage(): never {
  console.error(
    "usage: cli.js <extract-molecules|extract-pockets|fetch-literature> --in PATH --out PATH" +
    " [--budget N] [--offline SNAPSHOT] [--n-bits N] [--radius N]",
  );
  process.exit(2);
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (!command) usage();
  const { values } = parseArgs({
    args: rest,
    options: {
      in: { type: "string" },
      out: { type: "string" },
      budget: { type: "string" },
      offline: { type: "string" },
      "n-bits": { type: "string" },
      radius: { type: "string" },
    },
  });
  if (!values.in || !values.out) usage();

  if (command === "extract-molecules") {
    return cmdExtractMolecules(values.in, values.out, {
      nBits: values["n-bits"] ? parseInt(values["n-bits"], 10) : undefined,
      radius: values.radius ? parseInt(values.radius, 10) : undefined,
    });
  }
  if (command === "extract-pockets") {
    return cmdExtractPockets(values.in, values.out);
  }
  if (command === "fetch-literature") {
    return cmdFetchLiterature(values.in, values.out, {
      budget: values.budget ? parseInt(values.budget, 10) : undefined,
      offlineSnapshot: values.offline,
    });
  }
  usage();
}

/** Input lines: "id<TAB>smiles" or bare SMILES (ids are generated). */
function cmdExtractMolecules(
  inPath: string,
  outPath: string,
  options: { nBits?: number; radius?: number },
): number {
  const entries = readLines(inPath).map((line, i) => {
    const [first, second] = line.split("\t");
    return second !== undefined
      ? { id: first.trim(), smiles: second.trim() }
      : { id: `M${String(i + 1).padStart(4, "0")}`, smiles: first.trim() };
  });
  const { records, skipped } = extractMoleculeProfiles(entries, options);
  for (const skip of skipped) {
    console.warn(`skipped ${skip.id} (${skip.smiles}): ${skip.reason}`);
  }
  writeJsonl(outPath, records);
  console.log(`wrote ${records.length} molecules to ${outPath} (${skipped.length} skipped)`);
  return 0;
}

function cmdExtractPockets(inPath: string, outPath: string): number {
  const stat = fs.statSync(inPath);
  const files = stat.isDirectory()
    ? fs
        .readdirSync(inPath)
        .filter((f) => /\.(pdb|ent)$/i.test(f))
        .sort()
        .map((f) => path.join(inPath, f))
    : [inPath];
  if (!files.length) throw new Error(`no structure files under ${inPath}`);
  const records = files.map(proteinRecordFromFile);
  writeJsonl(outPath, records);
  const pocketCount = records.reduce((n, r) => n + r.pockets.length, 0);
  console.log(`wrote ${records.length} proteins (${pocketCount} pockets) to ${outPath}`);
  return 0;
}

async function cmdFetchLiterature(
  inPath: string,
  outPath: string,
  options: { budget?: number; offlineSnapshot?: string },
): Promise<number> {
  const proteins = readJsonl<ProteinRecord>(inPath);
  const literature = await fetchLiterature(
    proteins.map((p) => ({ id: p.id, name: p.name })),
    options,
  );
  const enriched = proteins.map((p) => ({ ...p, literature: literature[p.id] ?? [] }));
  writeJsonl(outPath, enriched);
  const total = enriched.reduce((n, p) => n + p.literature.length, 0);
  console.log(`attached ${total} literature entries across ${enriched.length} proteins`);
  return 0;
}

const isDirectRun = process.argv[1] && path.resolve(process.argv[1]) === new URL(import.meta.url).pathname;
if (isDirectRun) {
  main(process.argv.slice(2))
    .then((code) => process.exit(code))
    .catch((error) => {
      console.error(`error: ${error.message}`);
      process.exit(1);
    });
}
