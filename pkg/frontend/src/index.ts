/**
 * Bindings over the `rankbucket` CLI.
 *
 * `compute` evaluates one loss kind on plain arrays and returns the loss,
 * its two components, and the per-logit gradient vector in input order.
 * `generate` produces a seeded synthetic detection set. Both shell out to
 * the installed CLI and exchange data through its JSONL format, so the
 * numbers here are the primary implementation's numbers, not a port.
 */

import { spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export const LOSS_KINDS = ["ap", "rs", "bap", "brs", "oracle-ap", "oracle-rs"] as const;
export type LossKind = (typeof LOSS_KINDS)[number];

export interface BindingResult {
  loss: number;
  ranking: number;
  sorting: number;
  grads: number[];
}

export interface GeneratedSet {
  scores: number[];
  /** 1 for positives, 0 for negatives. */
  labels: number[];
  /** IoU per positive index, null at negatives. */
  ious: (number | null)[];
}

export interface GenerateOptions {
  posMean?: number;
  posStd?: number;
  negMean?: number;
  negStd?: number;
}

/** Raised for malformed inputs and for CLI-reported data errors. */
export class BindingError extends Error {}

const CLI = process.env.RANKBUCKET_BIN ?? "rankbucket";
// eval reports on large sets can run to hundreds of MB of JSON
const MAX_BUFFER = 1 << 29;

function runCli(args: string[]): string {
  const proc = spawnSync(CLI, args, {
    encoding: "utf-8",
    maxBuffer: MAX_BUFFER,
  });
  if (proc.error) {
    throw new BindingError(
      `failed to launch '${CLI}': ${proc.error.message} (is the package installed?)`,
    );
  }
  if (proc.status !== 0) {
    const detail = proc.stderr.trim() || `exit code ${proc.status}`;
    throw new BindingError(`${CLI} ${args[0]}: ${detail}`);
  }
  return proc.stdout;
}

function withTempDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "rankbucket-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}

function asLabel(value: number | boolean, index: number): 0 | 1 {
  if (value === 0 || value === false) return 0;
  if (value === 1 || value === true) return 1;
  throw new BindingError(`labels[${index}] must be 0, 1, or boolean`);
}

function toJsonl(
  scores: readonly number[],
  labels: readonly (number | boolean)[],
  ious: readonly (number | null | undefined)[],
): string {
  const lines: string[] = [];
  for (let i = 0; i < scores.length; i++) {
    const score = scores[i]!;
    if (!Number.isFinite(score)) {
      throw new BindingError(`scores[${i}] is not finite`);
    }
    const label = asLabel(labels[i]!, i);
    if (label === 1) {
      const iou = ious[i];
      if (iou === null || iou === undefined) {
        // tolerated: the CLI accepts iou-free positives for ranking-only
        // kinds and rejects them for sorting kinds
        lines.push(JSON.stringify({ score, label }));
        continue;
      }
      if (!Number.isFinite(iou) || iou < 0 || iou > 1) {
        throw new BindingError(`ious[${i}] must lie in [0, 1] at a positive index`);
      }
      lines.push(JSON.stringify({ score, label, iou }));
    } else {
      // placeholder iou values at negative indices are ignored by contract
      lines.push(JSON.stringify({ score, label }));
    }
  }
  return lines.join("\n") + "\n";
}

/**
 * Evaluate one loss kind over a detection set given as parallel arrays.
 *
 * `ious` entries at negative indices are ignored; entries at positive
 * indices must lie in [0, 1] (or be null for kinds that do not read IoUs).
 */
export function compute(
  scores: readonly number[],
  labels: readonly (number | boolean)[],
  ious: readonly (number | null | undefined)[],
  delta: number,
  kind: LossKind,
): BindingResult {
  if (!(LOSS_KINDS as readonly string[]).includes(kind)) {
    throw new BindingError(`unknown loss kind '${kind}'`);
  }
  if (labels.length !== scores.length || ious.length !== scores.length) {
    throw new BindingError(
      `length mismatch: scores ${scores.length}, labels ${labels.length}, ious ${ious.length}`,
    );
  }
  if (!Number.isFinite(delta) || delta < 0) {
    throw new BindingError("delta must be finite and >= 0");
  }
  if (scores.length === 0) {
    return { loss: 0, ranking: 0, sorting: 0, grads: [] };
  }
  const jsonl = toJsonl(scores, labels, ious);
  const stdout = withTempDir((dir) => {
    const file = join(dir, "in.jsonl");
    writeFileSync(file, jsonl, "utf-8");
    return runCli(["eval", "--in", file, "--loss", kind, "--delta", String(delta)]);
  });
  const report = JSON.parse(stdout) as {
    loss: number;
    ranking_component: number;
    sorting_component: number;
    grads: number[];
  };
  return {
    loss: report.loss,
    ranking: report.ranking_component,
    sorting: report.sorting_component,
    grads: report.grads,
  };
}

/**
 * Generate a seeded synthetic detection set. Identical arguments produce
 * identical arrays (the CLI output is byte-deterministic).
 */
export function generate(
  numLogits: number,
  positivePct: number,
  seed: number,
  opts: GenerateOptions = {},
): GeneratedSet {
  if (!Number.isInteger(numLogits) || numLogits < 1) {
    throw new BindingError("numLogits must be a positive integer");
  }
  if (!Number.isFinite(positivePct) || positivePct < 0 || positivePct > 100) {
    throw new BindingError("positivePct must lie in [0, 100]");
  }
  if (!Number.isInteger(seed)) {
    throw new BindingError("seed must be an integer");
  }
  const text = withTempDir((dir) => {
    const file = join(dir, "out.jsonl");
    const args = [
      "gen",
      "--num-logits", String(numLogits),
      "--positive-pct", String(positivePct),
      "--seed", String(seed),
      "--out", file,
    ];
    if (opts.posMean !== undefined) args.push("--pos-mean", String(opts.posMean));
    if (opts.posStd !== undefined) args.push("--pos-std", String(opts.posStd));
    if (opts.negMean !== undefined) args.push("--neg-mean", String(opts.negMean));
    if (opts.negStd !== undefined) args.push("--neg-std", String(opts.negStd));
    runCli(args);
    return readFileSync(file, "utf-8");
  });
  return parseJsonl(text);
}

/** Parse the CLI's JSONL into arrays; exported for round-trip tooling. */
export function parseJsonl(text: string): GeneratedSet {
  const scores: number[] = [];
  const labels: number[] = [];
  const ious: (number | null)[] = [];
  let first = true;
  for (const raw of text.split("\n")) {
    const line = raw.trim();
    if (!line) continue;
    const obj = JSON.parse(line) as Record<string, unknown>;
    if (first) {
      first = false;
      if (!("score" in obj)) continue; // metadata header
    }
    scores.push(obj.score as number);
    const label = obj.label as number;
    labels.push(label);
    ious.push(label === 1 && typeof obj.iou === "number" ? obj.iou : null);
  }
  return { scores, labels, ious };
}
