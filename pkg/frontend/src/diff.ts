/** Word-level diff of two texts, for comparing iteration descriptions. */

export type DiffOp = "equal" | "removed" | "added";

export interface DiffToken {
  op: DiffOp;
  word: string;
}

function tokenize(text: string): string[] {
  return text.split(/\s+/).filter((w) => w.length > 0);
}

/** Longest-common-subsequence diff over whitespace-separated words.
 * Tokens from `before` that are missing in `after` come out "removed",
 * new tokens "added", shared tokens "equal" in order. */
export function wordDiff(before: string, after: string): DiffToken[] {
  const a = tokenize(before);
  const b = tokenize(after);
  const n = a.length;
  const m = b.length;

  // lcs[i][j] = LCS length of a[i..] and b[j..]
  const lcs: number[][] = Array.from({ length: n + 1 }, () =>
    new Array<number>(m + 1).fill(0),
  );
  for (let i = n - 1; i >= 0; i--) {
    for (let j = m - 1; j >= 0; j--) {
      lcs[i][j] =
        a[i] === b[j]
          ? lcs[i + 1][j + 1] + 1
          : Math.max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }

  const out: DiffToken[] = [];
  let i = 0;
  let j = 0;
  while (i < n && j < m) {
    if (a[i] === b[j]) {
      out.push({ op: "equal", word: a[i] });
      i++;
      j++;
    } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
      out.push({ op: "removed", word: a[i] });
      i++;
    } else {
      out.push({ op: "added", word: b[j] });
      j++;
    }
  }
  for (; i < n; i++) out.push({ op: "removed", word: a[i] });
  for (; j < m; j++) out.push({ op: "added", word: b[j] });
  return out;
}

/** Count of non-equal tokens; 0 means the texts agree word for word. */
export function diffSize(tokens: DiffToken[]): number {
  return tokens.filter((t) => t.op !== "equal").length;
}
