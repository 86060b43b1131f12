import { describe, expect, it } from "vitest";

import { arcSectorPath, arcToRange, normDeg, rangeToArc, resizeArc, rotateArc } from "../src/arcs.js";

describe("arc geometry", () => {
  it("maps a plain range to mid/width and back", () => {
    const arc = rangeToArc(95, 165);
    expect(arc).toEqual({ midDeg: 130, widthDeg: 70 });
    expect(arcToRange(arc)).toEqual({ deg_min: 95, deg_max: 165 });
  });

  it("handles wrapped ranges", () => {
    const arc = rangeToArc(350, 10);
    expect(arc.widthDeg).toBe(20);
    expect(arc.midDeg).toBe(0);
    expect(arcToRange(arc)).toEqual({ deg_min: 350, deg_max: 10 });
  });

  it("dragging by +20 preserves the width: [95,165] -> [115,185]", () => {
    const dragged = rotateArc(rangeToArc(95, 165), 20);
    expect(arcToRange(dragged)).toEqual({ deg_min: 115, deg_max: 185 });
    expect(dragged.widthDeg).toBe(70);
  });

  it("round-trips range -> arc -> range across a grid", () => {
    for (let lo = 0; lo < 360; lo += 7) {
      for (let width = 0; width < 360; width += 11) {
        const hi = normDeg(lo + width);
        const back = arcToRange(rangeToArc(lo, hi));
        expect(back.deg_min).toBeCloseTo(lo, 9);
        expect(back.deg_max).toBeCloseTo(hi, 9);
      }
    }
  });

  it("round-trips arc -> range -> arc", () => {
    for (let mid = 0; mid < 360; mid += 13) {
      for (let width = 0; width < 360; width += 17) {
        const arc = { midDeg: mid, widthDeg: width };
        const { deg_min, deg_max } = arcToRange(arc);
        const back = rangeToArc(deg_min, deg_max);
        expect(back.widthDeg).toBeCloseTo(width, 9);
        expect(normDeg(back.midDeg - mid)).toBeCloseTo(0, 9);
      }
    }
  });

  it("rejects impossible widths", () => {
    expect(() => resizeArc({ midDeg: 10, widthDeg: 30 }, 360)).toThrow(RangeError);
    expect(() => resizeArc({ midDeg: 10, widthDeg: 30 }, -1)).toThrow(RangeError);
  });

  it("emits a drawable sector path", () => {
    const path = arcSectorPath(100, 100, 20, 35, rangeToArc(95, 165));
    expect(path.startsWith("M ")).toBe(true);
    expect(path).toContain("A 35 35");
    expect(path.endsWith("Z")).toBe(true);
  });
});
