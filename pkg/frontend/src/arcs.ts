/** Arc-handle geometry for direction constraints.
 *
 * A direction range renders as a thick arc centered on its anchor node:
 * the arc's central angle is the range width, its orientation the range
 * midpoint. The mapping is bijective for widths in [0, 360), so dragging
 * the arc and editing the numeric bounds stay consistent.
 */

export interface ArcGeometry {
  midDeg: number;
  widthDeg: number;
}

export function normDeg(angle: number): number {
  return ((angle % 360) + 360) % 360;
}

export function rangeToArc(degMin: number, degMax: number): ArcGeometry {
  const widthDeg = normDeg(degMax - degMin);
  return { midDeg: normDeg(degMin + widthDeg / 2), widthDeg };
}

export function arcToRange(arc: ArcGeometry): { deg_min: number; deg_max: number } {
  const deg_min = normDeg(arc.midDeg - arc.widthDeg / 2);
  return { deg_min, deg_max: normDeg(deg_min + arc.widthDeg) };
}

export function rotateArc(arc: ArcGeometry, deltaDeg: number): ArcGeometry {
  return { midDeg: normDeg(arc.midDeg + deltaDeg), widthDeg: arc.widthDeg };
}

export function resizeArc(arc: ArcGeometry, widthDeg: number): ArcGeometry {
  if (widthDeg < 0 || widthDeg >= 360) {
    throw new RangeError(`arc width must lie in [0, 360), got ${widthDeg}`);
  }
  return { midDeg: arc.midDeg, widthDeg };
}

/** SVG path for an annular sector centered on (cx, cy); image-space angles
 * (0 deg right, 90 deg down) match the engine's conventions. */
export function arcSectorPath(
  cx: number,
  cy: number,
  rInner: number,
  rOuter: number,
  arc: ArcGeometry,
): string {
  const a0 = ((arc.midDeg - arc.widthDeg / 2) * Math.PI) / 180;
  const a1 = ((arc.midDeg + arc.widthDeg / 2) * Math.PI) / 180;
  const large = arc.widthDeg > 180 ? 1 : 0;
  const p = (r: number, a: number) => `${cx + r * Math.cos(a)} ${cy + r * Math.sin(a)}`;
  return [
    `M ${p(rInner, a0)}`,
    `L ${p(rOuter, a0)}`,
    `A ${rOuter} ${rOuter} 0 ${large} 1 ${p(rOuter, a1)}`,
    `L ${p(rInner, a1)}`,
    `A ${rInner} ${rInner} 0 ${large} 0 ${p(rInner, a0)}`,
    "Z",
  ].join(" ");
}
