/** Wire types for the exported bundle (schema_version 1). */

export const SUPPORTED_SCHEMA_VERSION = 1

export type QuartileLabel = '--' | '-' | '+' | '++'

export interface PointLabels {
  economy: QuartileLabel
  carbon: QuartileLabel
  habitat: QuartileLabel
}

export interface BundlePoint {
  g2g_compensation: number
  f2e_price: number
  carbon_kg: number
  habitat_index: number
  gross_economic_benefits: number
  reverted_area_mu: number
  electricity_kwh: number
  financial_burden: number
  frontier: boolean
  labels: PointLabels | null
}

export interface SurrogateJson {
  form: 'g2g_budget' | 'f2e_budget' | 'habitat_cubic' | 'econ_quadratic'
  coefficients: number[]
  train_r2: number
  test_r2: number
  x1_scale: number
  x2_scale: number
  x2_linear: boolean
}

export interface ExplorerBundle {
  schema_version: number
  config_hash: string
  base_seed: number | null
  reference_year: number | null
  lattice: { g2g: number[]; f2e: number[] }
  points: BundlePoint[]
  surrogates: {
    g2g_budget: SurrogateJson
    f2e_budget: SurrogateJson
    habitat: SurrogateJson
    economy: SurrogateJson
  }
  defaults: {
    budget_cap: number
    min_reverted_area_mu: number
    weights: { carbon: number; habitat: number; economy: number }
  }
}

export interface Weights {
  carbon: number
  habitat: number
  economy: number
}

export interface Query {
  budgetCap: number
  minRevertedAreaMu: number
  weights: Weights
}

export interface ExplorerState {
  bundle: ExplorerBundle
  query: Query
  /** scenario key of the hovered or selected point, if any */
  selected: string | null
}

export function scenarioKey(p: { g2g_compensation: number; f2e_price: number }): string {
  return `${p.g2g_compensation}/${p.f2e_price.toFixed(2)}`
}
