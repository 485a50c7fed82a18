/** Synthetic CSVs matching the simulator's documented schemas. */
export const SWEEP_HEADER =
  "param,fr_with,fr_with_err,fr_without,fr_without_err,converged_with,converged_without,pmulti_max";

export function sweepCsv(rows: Array<[number, number, number, number, number]>): string {
  const body = rows.map(
    ([param, fw, fwErr, fo, foErr]) =>
      `${param},${fw},${fwErr},${fo},${foErr},true,true,1e-06`,
  );
  return [SWEEP_HEADER, ...body].join("\n") + "\n";
}

/** Two curves that cross near ratio 0.5, with-control above beyond it. */
export function ratioFixture(): string {
  const rows: Array<[number, number, number, number, number]> = [];
  for (let i = 0; i <= 12; i++) {
    const x = 0.1 + (2.4 * i) / 12;
    const without = (3 * x * x) / (3 * x * x + 1) - 0.08 * Math.max(0, x - 0.5);
    const withCtl = without + 0.15 * Math.tanh(Math.max(0, x - 0.5));
    rows.push([x, withCtl, 0.02, without, 0.02]);
  }
  return sweepCsv(rows);
}

/** A dip centered near 5.0 um between flat wings at 0.8. */
export function distanceFixture(): string {
  const rows: Array<[number, number, number, number, number]> = [];
  for (let i = 0; i <= 14; i++) {
    const x = 2.0 + (7.0 * i) / 14;
    const dip = 0.8 - 0.3 * Math.exp(-((x - 5.0) ** 2) / 0.8);
    rows.push([x, dip, 0.02, 0.8, 0.02]);
  }
  return sweepCsv(rows);
}

export function dynamicsCsv(): string {
  const header =
    "time,P_gc,P_gc_err,P_rc,P_rc_err,P_gcG,P_gcG_err,P_multi,P_multi_err";
  const lines = [header];
  for (let i = 0; i <= 50; i++) {
    const t = i * 0.5;
    const rise = 1 - Math.exp(-t / 5);
    lines.push(
      [t, 0.3 * rise, 0.01, 0.45 * rise, 0.01, 1 - 0.8 * rise, 0.01, 1e-5, 1e-6].join(","),
    );
  }
  return lines.join("\n") + "\n";
}
