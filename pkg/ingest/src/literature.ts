/** Literature snippets per protein: live public-index queries with retry,
 * or an offline snapshot for air-gapped runs. */

import fs from "node:fs";

export interface LiteratureEntry {
  source_id: string;
  title: string;
  abstract: string;
}

export interface FetchOptions {
  budget?: number;
  offlineSnapshot?: string;
  baseUrl?: string;
  retries?: number;
  fetchImpl?: typeof fetch;
  sleep?: (ms: number) => Promise<void>;
}

const DEFAULT_BUDGET = 2;
const EUTILS = "https://eutils.ncbi.nlm.nih.gov/entrez/eutils";

function defaultSleep(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

export function loadSnapshot(path: string): Record<string, LiteratureEntry[]> {
  const parsed = JSON.parse(fs.readFileSync(path, "utf-8"));
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    throw new Error(`snapshot ${path} must map protein ids to entry arrays`);
  }
  return parsed as Record<string, LiteratureEntry[]>;
}

/** Up to `budget` entries per protein name/id. Offline mode reads the
 * snapshot verbatim; online mode queries esearch + efetch, retries once,
 * then skips the protein with a warning. */
export async function fetchLiterature(
  proteins: { id: string; name: string }[],
  options: FetchOptions = {},
): Promise<Record<string, LiteratureEntry[]>> {
  const budget = options.budget ?? DEFAULT_BUDGET;
  const result: Record<string, LiteratureEntry[]> = {};
  if (budget <= 0) {
    for (const protein of proteins) result[protein.id] = [];
    return result;
  }
  if (options.offlineSnapshot) {
    const snapshot = loadSnapshot(options.offlineSnapshot);
    for (const protein of proteins) {
      result[protein.id] = (snapshot[protein.id] ?? snapshot[protein.name] ?? []).slice(0, budget);
    }
    return result;
  }

  const fetchImpl = options.fetchImpl ?? fetch;
  const sleep = options.sleep ?? defaultSleep;
  const retries = options.retries ?? 1;
  const base = options.baseUrl ?? EUTILS;
  for (const protein of proteins) {
    let entries: LiteratureEntry[] | null = null;
    for (let attempt = 0; attempt <= retries && entries === null; attempt++) {
      if (attempt > 0) await sleep(500 * attempt);
      try {
        entries = await queryOnce(fetchImpl, base, protein.name, budget);
      } catch (error) {
        console.warn(`literature query failed for ${protein.id}: ${(error as Error).message}`);
      }
    }
    if (entries === null) {
      console.warn(`skipping literature for ${protein.id} after ${retries + 1} attempts`);
      entries = [];
    }
    result[protein.id] = entries;
  }
  return result;
}

async function queryOnce(
  fetchImpl: typeof fetch,
  base: string,
  term: string,
  budget: number,
): Promise<LiteratureEntry[]> {
  const searchUrl =
    `${base}/esearch.fcgi?db=pubmed&term=${encodeURIComponent(term)}` +
    `&retmode=json&retmax=${budget}`;
  const searchResponse = await fetchImpl(searchUrl);
  if (!searchResponse.ok) throw new Error(`esearch status ${searchResponse.status}`);
  const searchData = (await searchResponse.json()) as {
    esearchresult?: { idlist?: string[] };
  };
  const ids = searchData.esearchresult?.idlist ?? [];
  if (!ids.length) return [];

  const fetchUrl = `${base}/efetch.fcgi?db=pubmed&id=${ids.join(",")}&rettype=abstract&retmode=xml`;
  const fetchResponse = await fetchImpl(fetchUrl);
  if (!fetchResponse.ok) throw new Error(`efetch status ${fetchResponse.status}`);
  const xml = await fetchResponse.text();
  return parseEfetchXml(xml, ids).slice(0, budget);
}

export function parseEfetchXml(xml: string, ids: string[]): LiteratureEntry[] {
  const entries: LiteratureEntry[] = [];
  const articles = xml.split("</PubmedArticle>");
  for (const chunk of articles) {
    const pmid = chunk.match(/<PMID[^>]*>(\d+)<\/PMID>/)?.[1];
    if (!pmid || !ids.includes(pmid)) continue;
    const title = decodeEntities(
      chunk.match(/<ArticleTitle[^>]*>([\s\S]*?)<\/ArticleTitle>/)?.[1] ?? "",
    ).trim();
    const abstractParts = [...chunk.matchAll(/<AbstractText[^>]*>([\s\S]*?)<\/AbstractText>/g)];
    const abstract = decodeEntities(
      abstractParts.map((m) => m[1]).join(" ").replace(/<[^>]+>/g, ""),
    ).trim();
    if (title) entries.push({ source_id: pmid, title, abstract });
  }
  return entries;
}

function decodeEntities(text: string): string {
  return text
    .replace(/&lt;/g, "<")
    .replace(/&gt;/g, ">")
    .replace(/&quot;/g, '"')
    .replace(/&apos;/g, "'")
    .replace(/&amp;/g, "&");
}
