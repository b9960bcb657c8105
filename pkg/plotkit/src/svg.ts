/**
 * Deterministic hand-rolled SVG rendering: fixed style, no timestamps,
 * identical inputs produce identical bytes.
 */

const FONT = "12px sans-serif";
const PALETTE = ["#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3"];

export interface Bar {
  label: string;
  value: number | null; // null renders a gap
}

export interface BarGroup {
  label: string;
  bars: Bar[];
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

function fmt(v: number): string {
  return Number.isInteger(v) ? String(v) : v.toPrecision(4);
}

export function colorFor(index: number): string {
  return PALETTE[index % PALETTE.length];
}

/** Grouped bar chart; one group per scenario, one bar per variant. */
export function groupedBarChart(
  title: string,
  groups: BarGroup[],
  variants: string[],
): string {
  const width = Math.max(420, 90 + groups.length * (variants.length * 46 + 40));
  const height = 320;
  const plot = { x: 60, y: 48, w: width - 90, h: 200 };
  const values = groups.flatMap((g) => g.bars.map((b) => b.value ?? 0));
  const vMax = Math.max(...values, 1e-9) * 1.15;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" style="font:14px sans-serif;font-weight:bold">${esc(title)}</text>`,
  );
  // axes
  parts.push(
    `<line x1="${plot.x}" y1="${plot.y}" x2="${plot.x}" y2="${plot.y + plot.h}" stroke="black"/>`,
    `<line x1="${plot.x}" y1="${plot.y + plot.h}" x2="${plot.x + plot.w}" y2="${plot.y + plot.h}" stroke="black"/>`,
  );
  for (let t = 0; t <= 4; t++) {
    const v = (vMax * t) / 4;
    const y = plot.y + plot.h - (plot.h * t) / 4;
    parts.push(
      `<line x1="${plot.x - 4}" y1="${y}" x2="${plot.x}" y2="${y}" stroke="black"/>`,
      `<text x="${plot.x - 8}" y="${y + 4}" text-anchor="end" style="font:${FONT}">${fmt(v)}</text>`,
    );
  }

  const groupWidth = plot.w / Math.max(groups.length, 1);
  const barWidth = Math.min(40, (groupWidth - 24) / Math.max(variants.length, 1));
  groups.forEach((group, gi) => {
    const gx = plot.x + gi * groupWidth;
    const inner = variants.length * barWidth;
    const x0 = gx + (groupWidth - inner) / 2;
    group.bars.forEach((bar, bi) => {
      const x = x0 + bi * barWidth;
      if (bar.value === null) {
        parts.push(
          `<text x="${x + barWidth / 2}" y="${plot.y + plot.h - 6}" text-anchor="middle" style="font:${FONT}" fill="#999">n/a</text>`,
        );
        return;
      }
      const h = (Math.max(bar.value, 0) / vMax) * plot.h;
      const y = plot.y + plot.h - h;
      parts.push(
        `<rect x="${x + 2}" y="${y}" width="${barWidth - 4}" height="${h}" fill="${colorFor(bi)}"/>`,
        `<text x="${x + barWidth / 2}" y="${y - 4}" text-anchor="middle" style="font:${FONT}">${fmt(bar.value)}</text>`,
      );
    });
    parts.push(
      `<text x="${gx + groupWidth / 2}" y="${plot.y + plot.h + 18}" text-anchor="middle" style="font:${FONT}">${esc(group.label)}</text>`,
    );
  });

  // legend
  variants.forEach((v, i) => {
    const lx = plot.x + i * 130;
    const ly = height - 28;
    parts.push(
      `<rect x="${lx}" y="${ly - 10}" width="12" height="12" fill="${colorFor(i)}"/>`,
      `<text x="${lx + 18}" y="${ly}" style="font:${FONT}">${esc(v)}</text>`,
    );
  });
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export interface Series {
  label: string;
  xs: number[];
  ys: number[];
}

/** Line chart with one or more series (training curves). */
export function lineChart(title: string, caption: string, series: Series[]): string {
  const width = 640;
  const height = 360;
  const plot = { x: 64, y: 48, w: width - 100, h: 230 };
  const allX = series.flatMap((s) => s.xs);
  const allY = series.flatMap((s) => s.ys);
  const xMin = Math.min(...allX);
  const xMax = Math.max(...allX, xMin + 1e-9);
  const yMin = Math.min(...allY, 0);
  const yMax = Math.max(...allY, yMin + 1e-9);
  const sx = (x: number) => plot.x + ((x - xMin) / (xMax - xMin)) * plot.w;
  const sy = (y: number) => plot.y + plot.h - ((y - yMin) / (yMax - yMin)) * plot.h;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${width / 2}" y="24" text-anchor="middle" style="font:14px sans-serif;font-weight:bold">${esc(title)}</text>`,
  );
  parts.push(
    `<line x1="${plot.x}" y1="${plot.y}" x2="${plot.x}" y2="${plot.y + plot.h}" stroke="black"/>`,
    `<line x1="${plot.x}" y1="${plot.y + plot.h}" x2="${plot.x + plot.w}" y2="${plot.y + plot.h}" stroke="black"/>`,
  );
  for (let t = 0; t <= 4; t++) {
    const v = yMin + ((yMax - yMin) * t) / 4;
    const y = sy(v);
    parts.push(
      `<text x="${plot.x - 8}" y="${y + 4}" text-anchor="end" style="font:${FONT}">${fmt(v)}</text>`,
    );
    const xv = xMin + ((xMax - xMin) * t) / 4;
    parts.push(
      `<text x="${sx(xv)}" y="${plot.y + plot.h + 18}" text-anchor="middle" style="font:${FONT}">${fmt(xv)}</text>`,
    );
  }
  series.forEach((s, i) => {
    const pts = s.xs.map((x, j) => `${sx(x)},${sy(s.ys[j])}`).join(" ");
    parts.push(
      `<polyline points="${pts}" fill="none" stroke="${colorFor(i)}" stroke-width="1.5"/>`,
    );
    const lx = plot.x + i * 180;
    const ly = height - 44;
    parts.push(
      `<rect x="${lx}" y="${ly - 10}" width="12" height="12" fill="${colorFor(i)}"/>`,
      `<text x="${lx + 18}" y="${ly}" style="font:${FONT}">${esc(s.label)}</text>`,
    );
  });
  parts.push(
    `<text x="${plot.x}" y="${height - 14}" style="font:${FONT}" fill="#555">${esc(caption)}</text>`,
  );
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
