/**
 * Minimal CSV reader for the simulator's outputs.
 *
 * The dialect is deliberately trivial (no quoting, LF endings, `#` header
 * comments), so the whole parser fits here and can afford to be strict: the
 * column list must match the expected schema exactly, and an input with no
 * data rows is rejected.
 */

export class SchemaError extends Error {}

export interface CsvTable {
  /** `# key = value` lines from the resolved-config header. */
  header: Map<string, string>;
  columns: string[];
  rows: Record<string, string>[];
}

export function parseCsv(text: string, expected: readonly string[]): CsvTable {
  const header = new Map<string, string>();
  let columns: string[] | null = null;
  const rows: Record<string, string>[] = [];

  for (const raw of text.split("\n")) {
    const line = raw.trimEnd();
    if (line === "") continue;
    if (line.startsWith("#")) {
      const m = line.match(/^#\s*([\w.]+)\s*=\s*(.*)$/);
      if (m) header.set(m[1], m[2]);
      continue;
    }
    if (columns === null) {
      columns = line.split(",");
      if (columns.length !== expected.length || columns.some((c, i) => c !== expected[i])) {
        throw new SchemaError(
          `column mismatch: expected [${expected.join(", ")}], got [${columns.join(", ")}]`,
        );
      }
      continue;
    }
    const parts = line.split(",");
    if (parts.length !== columns.length) {
      throw new SchemaError(
        `row has ${parts.length} fields, expected ${columns.length}: ${line}`,
      );
    }
    const row: Record<string, string> = {};
    columns.forEach((c, i) => (row[c] = parts[i]));
    rows.push(row);
  }

  if (columns === null) throw new SchemaError("input has no column header");
  if (rows.length === 0) throw new SchemaError("input has no data rows");
  return { header, columns, rows };
}

export function num(row: Record<string, string>, column: string): number {
  const v = Number(row[column]);
  if (!Number.isFinite(v)) {
    throw new SchemaError(`non-numeric value ${JSON.stringify(row[column])} in column ${column}`);
  }
  return v;
}
