import { mkdirSync, readFileSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { runCli, withScratchDir } from "./cli";
import { MapGrid, MaskGrid, requireMap, requireMask } from "./grid";
import { decodePmap, encodePmap } from "./pmap";
import { decodeGrayPng, encodeGrayPng, encodeRgbPng } from "./png";

/** Version of the bindings; matches the core library version. */
export const version = "1.0.0";

export interface IrregularityResult {
  boxRatio: number;
  convexRatio: number;
  iri: number;
}

/** Shape irregularity ratios of an 8-bit mask (nonzero = foreground). */
export function bindIrregularity(mask: MaskGrid): IrregularityResult {
  requireMask(mask, "mask");
  return withScratchDir((dir) => {
    const maskPath = join(dir, "mask.png");
    writeFileSync(maskPath, encodeGrayPng(mask));
    const doc = JSON.parse(runCli(["irregularity", "--mask", maskPath]));
    return {
      boxRatio: doc.box_ratio,
      convexRatio: doc.convex_ratio,
      iri: doc.iri,
    };
  });
}

export interface ValidityReport {
  objectType: string;
  pProb: number;
  pR: number;
  pG: number;
  pB: number;
  summaryP: number;
  isValid: boolean;
}

/**
 * Score one prediction against a serialized validity model.
 *
 * `modelJson` is the model document produced by the core fit step;
 * `rgb` carries the three 8-bit channel planes of the input image.
 */
export function bindValidityTest(
  modelJson: string,
  pmap: MapGrid,
  rgb: readonly [MaskGrid, MaskGrid, MaskGrid],
  cutoff?: number,
): ValidityReport {
  requireMap(pmap, "pmap");
  rgb.forEach((plane, i) => requireMask(plane, `rgb[${i}]`));
  return withScratchDir((dir) => {
    const modelPath = join(dir, "model.json");
    const pmapPath = join(dir, "pred.pmap");
    const imagePath = join(dir, "image.png");
    writeFileSync(modelPath, modelJson);
    writeFileSync(pmapPath, encodePmap(pmap));
    writeFileSync(imagePath, encodeRgbPng(rgb[0], rgb[1], rgb[2]));
    const args = ["validity", "test", "--model", modelPath,
                  "--pmap", pmapPath, "--image", imagePath];
    if (cutoff !== undefined) {
      args.push("--cutoff", String(cutoff));
    }
    const doc = JSON.parse(runCli(args));
    return {
      objectType: doc.object_type,
      pProb: doc.p_prob,
      pR: doc.p_r,
      pG: doc.p_g,
      pB: doc.p_b,
      summaryP: doc.summary_p,
      isValid: doc.is_valid,
    };
  });
}

export interface RecognitionResult {
  /** int label grid: 0 background, i + 1 = the i-th input map. */
  labels: MaskGrid;
  /** indices of the surviving maps, ascending. */
  selected: number[];
  /** per-map areas above the probability threshold, input order. */
  originalAreas: number[];
  /** per-map areas surviving the provisional argmax, input order. */
  finalAreas: number[];
}

function stemName(i: number): string {
  return `t${String(i).padStart(3, "0")}`;
}

/** Merge per-target probability maps into a single label map. */
export function bindRecognize(pmaps: readonly MapGrid[], lambda?: number): RecognitionResult {
  pmaps.forEach((p, i) => requireMap(p, `pmaps[${i}]`));
  return withScratchDir((dir) => {
    const mapsDir = join(dir, "maps");
    mkdirSync(mapsDir);
    const names = pmaps.map((_, i) => stemName(i));
    pmaps.forEach((p, i) => {
      writeFileSync(join(mapsDir, `${names[i]}.pmap`), encodePmap(p));
    });
    const legendIn = join(dir, "targets.json");
    writeFileSync(legendIn, JSON.stringify({ targets: names }));
    const labelsPath = join(dir, "labels.png");
    const legendOut = join(dir, "legend.json");
    const args = ["recognize", "--pmaps", mapsDir, "--legend-in", legendIn,
                  "--out", labelsPath, "--legend", legendOut];
    if (lambda !== undefined) {
      args.push("--lambda", String(lambda));
    }
    const doc = JSON.parse(runCli(args));
    const byName = (areas: Record<string, number>) =>
      names.map((name) => areas[name]);
    return {
      labels: decodeGrayPng(readFileSync(labelsPath)),
      selected: (doc.selected as string[])
        .map((name) => names.indexOf(name))
        .sort((a, b) => a - b),
      originalAreas: byName(doc.original_areas),
      finalAreas: byName(doc.final_areas),
    };
  });
}

/** Translation-aligned mean of probability maps (first map is the frame). */
export function bindEnsembleShapes(pmaps: readonly MapGrid[]): MapGrid {
  pmaps.forEach((p, i) => requireMap(p, `pmaps[${i}]`));
  return withScratchDir((dir) => {
    const mapsDir = join(dir, "maps");
    mkdirSync(mapsDir);
    pmaps.forEach((p, i) => {
      const stem = `s${String(i).padStart(3, "0")}`;
      writeFileSync(join(mapsDir, `${stem}.pmap`), encodePmap(p));
    });
    const outPath = join(dir, "mean.pmap");
    runCli(["shapemap", "--pmaps", mapsDir, "--out", outPath]);
    return decodePmap(readFileSync(outPath));
  });
}

/** Dice overlap of two 8-bit masks (nonzero = foreground). */
export function bindDice(a: MaskGrid, b: MaskGrid): number {
  requireMask(a, "a");
  requireMask(b, "b");
  return withScratchDir((dir) => {
    const predDir = join(dir, "pred");
    const goldDir = join(dir, "gold");
    mkdirSync(predDir);
    mkdirSync(goldDir);
    writeFileSync(join(predDir, "case.png"), encodeGrayPng(a));
    writeFileSync(join(goldDir, "case.png"), encodeGrayPng(b));
    const doc = JSON.parse(
      runCli(["eval", "dice", "--pred", predDir, "--gold", goldDir]));
    return doc.per_image.case;
  });
}
