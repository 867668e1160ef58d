/** JSONL writing matching the corpus convention: one compact record per
 * line, keys in schema order (the record builders already order them). */

import fs from "node:fs";
import path from "node:path";

export function writeJsonl(filePath: string, records: unknown[]): void {
  fs.mkdirSync(path.dirname(path.resolve(filePath)), { recursive: true });
  const body = records.map((r) => JSON.stringify(r)).join("\n");
  fs.writeFileSync(filePath, records.length ? body + "\n" : "", "utf-8");
}

export function readLines(filePath: string): string[] {
  return fs
    .readFileSync(filePath, "utf-8")
    .split(/\r?\n/)
    .map((line) => line.trim())
    .filter((line) => line.length > 0 && !line.startsWith("#"));
}

export function readJsonl<T>(filePath: string): T[] {
  return readLines(filePath).map((line) => JSON.parse(line) as T);
}
