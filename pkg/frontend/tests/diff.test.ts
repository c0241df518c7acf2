import { describe, expect, it } from "vitest";

import { diffSize, wordDiff } from "../src/diff.js";

describe("wordDiff", () => {
  it("returns an empty diff for identical texts", () => {
    const tokens = wordDiff("one livingroom in center.", "one livingroom in center.");
    expect(diffSize(tokens)).toBe(0);
    expect(tokens.every((t) => t.op === "equal")).toBe(true);
  });

  it("flags exactly the changed size token", () => {
    const before = "livingroom1 covers 25 square meters located in center.";
    const after = "livingroom1 covers 30 square meters located in center.";
    const tokens = wordDiff(before, after);
    const changed = tokens.filter((t) => t.op !== "equal");
    expect(changed).toEqual([
      { op: "removed", word: "25" },
      { op: "added", word: "30" },
    ]);
  });

  it("handles pure insertion and deletion", () => {
    expect(wordDiff("", "a b")).toEqual([
      { op: "added", word: "a" },
      { op: "added", word: "b" },
    ]);
    expect(wordDiff("a b", "")).toEqual([
      { op: "removed", word: "a" },
      { op: "removed", word: "b" },
    ]);
  });

  it("preserves word order and reconstructs both sides", () => {
    const before = "bedroom1 has 14 squares in east";
    const after = "bedroom1 has 9 squares in north and west";
    const tokens = wordDiff(before, after);
    const left = tokens.filter((t) => t.op !== "added").map((t) => t.word);
    const right = tokens.filter((t) => t.op !== "removed").map((t) => t.word);
    expect(left.join(" ")).toBe(before);
    expect(right.join(" ")).toBe(after);
  });

  it("ignores whitespace differences", () => {
    expect(diffSize(wordDiff("a  b\n c", "a b c"))).toBe(0);
  });
});
