/**
 * Pure client-side analytics over a loaded bundle.
 *
 * posteriorSelect mirrors the primary toolkit's selection rule operation for
 * operation (same normalization, same score accumulation order, same tie
 * breaking), so both sides produce identical rankings on the shared fixtures.
 * Surrogate evaluation and the curve solvers reproduce the exported
 * coefficient forms for the overlay drawings.
 */

import type {
  BundlePoint,
  ExplorerBundle,
  Query,
  SurrogateJson,
} from './types'
import { SUPPORTED_SCHEMA_VERSION } from './types'

export class BundleFormatError extends Error {}

export interface Ranked {
  point: BundlePoint
  score: number
  normalized: { carbon: number; habitat: number; economy: number }
}

export function parseBundle(text: string): ExplorerBundle {
  let data: unknown
  try {
    data = JSON.parse(text)
  } catch (err) {
    throw new BundleFormatError(`bundle is not valid JSON: ${(err as Error).message}`)
  }
  return validateBundle(data)
}

export function validateBundle(data: unknown): ExplorerBundle {
  if (typeof data !== 'object' || data === null) {
    throw new BundleFormatError('bundle must be a JSON object')
  }
  const bundle = data as Partial<ExplorerBundle>
  if (bundle.schema_version !== SUPPORTED_SCHEMA_VERSION) {
    throw new BundleFormatError(
      `unsupported bundle schema_version ${String(bundle.schema_version)}; ` +
      `this explorer understands version ${SUPPORTED_SCHEMA_VERSION}`,
    )
  }
  if (!Array.isArray(bundle.points) || bundle.points.length === 0) {
    throw new BundleFormatError('bundle carries no scenario points')
  }
  for (const field of ['lattice', 'surrogates', 'defaults'] as const) {
    if (bundle[field] === undefined) {
      throw new BundleFormatError(`bundle is missing '${field}'`)
    }
  }
  const required = [
    'g2g_compensation', 'f2e_price', 'carbon_kg', 'habitat_index',
    'gross_economic_benefits', 'reverted_area_mu', 'electricity_kwh',
    'financial_burden', 'frontier',
  ] as const
  for (const p of bundle.points) {
    for (const field of required) {
      if ((p as unknown as Record<string, unknown>)[field] === undefined) {
        throw new BundleFormatError(`a point is missing '${field}'`)
      }
    }
  }
  return bundle as ExplorerBundle
}

/** Min-max goodness; mirrors the primary's fraction exactly. */
function goodness(values: number[], maximize: boolean): number[] {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (hi - lo <= 0) return values.map(() => 1.0)
  return values.map((v) => {
    const g = (v - lo) / (hi - lo)
    return maximize ? g : 1.0 - g
  })
}

/**
 * Filter the frontier by budget and target, then rank the survivors by the
 * preference-weighted normalized score. Ties break toward lower financial
 * burden, then lexicographic scenario.
 */
export function posteriorSelect(frontier: BundlePoint[], query: Query): Ranked[] {
  const survivors = frontier.filter(
    (p) =>
      p.financial_burden <= query.budgetCap &&
      p.reverted_area_mu >= query.minRevertedAreaMu,
  )
  if (survivors.length === 0) return []
  const gCarbon = goodness(survivors.map((p) => p.carbon_kg), false)
  const gHabitat = goodness(survivors.map((p) => p.habitat_index), true)
  const gEconomy = goodness(survivors.map((p) => p.gross_economic_benefits), true)
  const ranked: Ranked[] = survivors.map((point, i) => ({
    point,
    score:
      query.weights.carbon * gCarbon[i] +
      query.weights.habitat * gHabitat[i] +
      query.weights.economy * gEconomy[i],
    normalized: { carbon: gCarbon[i], habitat: gHabitat[i], economy: gEconomy[i] },
  }))
  ranked.sort(
    (a, b) =>
      b.score - a.score ||
      a.point.financial_burden - b.point.financial_burden ||
      a.point.g2g_compensation - b.point.g2g_compensation ||
      a.point.f2e_price - b.point.f2e_price,
  )
  return ranked
}

export function frontierPoints(bundle: ExplorerBundle): BundlePoint[] {
  return bundle.points.filter((p) => p.frontier)
}

// --- surrogate evaluation and curve overlays --------------------------------

export function evalSurrogate(model: SurrogateJson, x1: number, x2: number): number {
  const u1 = x1 / model.x1_scale
  const u2 = x2 / model.x2_scale
  const c = model.coefficients
  switch (model.form) {
    case 'g2g_budget':
      return c[0] * Math.exp(Math.min(c[1] * u1, 700)) + c[2]
    case 'f2e_budget': {
      const linear = model.x2_linear ? u2 : u1
      return c[0] * u2 * u2 + c[1] * linear + c[2]
    }
    case 'habitat_cubic':
      return (
        c[0] + c[1] * u1 + c[2] * u2 + c[3] * u1 * u1 + c[4] * u1 * u2 +
        c[5] * u2 * u2 + c[6] * u1 ** 3 + c[7] * u1 * u1 * u2 +
        c[8] * u1 * u2 * u2 + c[9] * u2 ** 3
      )
    case 'econ_quadratic':
      return (
        c[0] + c[1] * u1 + c[2] * u2 + c[3] * u1 * u1 + c[4] * u1 * u2 +
        c[5] * u2 * u2
      )
  }
}

function bisect(f: (x: number) => number, lo: number, hi: number): number {
  let flo = f(lo)
  for (let i = 0; i < 80; i++) {
    const mid = 0.5 * (lo + hi)
    const fmid = f(mid)
    if (fmid === 0) return mid
    if ((fmid < 0) === (flo < 0)) {
      lo = mid
      flo = fmid
    } else {
      hi = mid
    }
  }
  return 0.5 * (lo + hi)
}

/** Budget-line overlay: x1 solving BG(x1) + BF(x1, x2) = budget per grid x2. */
export function budgetLine(
  budget: number,
  g2g: SurrogateJson,
  f2e: SurrogateJson,
  x2Grid: number[],
  x1Max: number,
): Array<[number, number]> {
  const out: Array<[number, number]> = []
  for (const x2 of x2Grid) {
    const f = (x1: number) => evalSurrogate(g2g, x1, 0) + evalSurrogate(f2e, x1, x2) - budget
    const lo = f(0)
    const hi = f(x1Max)
    if (lo === 0) {
      out.push([0, x2])
    } else if (hi === 0) {
      out.push([x1Max, x2])
    } else if ((lo < 0) !== (hi < 0)) {
      out.push([bisect(f, 0, x1Max), x2])
    }
  }
  return out
}

/**
 * Level-set overlay: all x1 roots of surface(x1, x2) = level found by a
 * sign-change scan over [0, x1Max] (branches included).
 */
export function indifferenceCurve(
  model: SurrogateJson,
  level: number,
  x2Grid: number[],
  x1Max: number,
  scanSteps = 64,
): Array<[number, number]> {
  const out: Array<[number, number]> = []
  for (const x2 of x2Grid) {
    const f = (x1: number) => evalSurrogate(model, x1, x2) - level
    let prevX = 0
    let prevF = f(0)
    if (prevF === 0) out.push([0, x2])
    for (let i = 1; i <= scanSteps; i++) {
      const x = (i / scanSteps) * x1Max
      const fx = f(x)
      if (fx === 0) {
        out.push([x, x2])
      } else if ((fx < 0) !== (prevF < 0)) {
        out.push([bisect(f, prevX, x), x2])
      }
      prevX = x
      prevF = fx
    }
  }
  return out
}
