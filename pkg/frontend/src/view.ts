/**
 * View-model computation and SVG rendering.
 *
 * The view model is a pure function of (bundle, query, selection): scatter of
 * all scenarios on the direct-benefit plane (X1 reverted area, X2 electricity),
 * carbon encoded by color with the scale direction reversed so that greener
 * means a lighter footprint, habitat by marker size, infeasible points greyed
 * out, plus overlay polylines and the ranked recommendation list.
 */

import {
  budgetLine,
  evalSurrogate,
  frontierPoints,
  indifferenceCurve,
  posteriorSelect,
  type Ranked,
} from './model'
import type { BundlePoint, ExplorerState } from './types'
import { scenarioKey } from './types'

export interface PlotPoint {
  key: string
  x: number
  y: number
  radius: number
  color: string
  feasible: boolean
  frontier: boolean
  point: BundlePoint
}

export interface ViewModel {
  plot: PlotPoint[]
  extent: { x: [number, number]; y: [number, number] }
  recommendation: Ranked[]
  budgetCurve: Array<[number, number]>
  targetX1: number
  habitatCurve: Array<[number, number]>
  economyCurve: Array<[number, number]>
  notices: string[]
}

function extent(values: number[]): [number, number] {
  let lo = Infinity
  let hi = -Infinity
  for (const v of values) {
    if (v < lo) lo = v
    if (v > hi) hi = v
  }
  if (!(hi > lo)) hi = lo + 1
  return [lo, hi]
}

/** Low carbon renders green, high carbon renders red (reversed readability). */
export function carbonColor(t: number): string {
  const clamped = Math.max(0, Math.min(1, t))
  const r = Math.round(40 + 200 * clamped)
  const g = Math.round(170 - 110 * clamped)
  const b = Math.round(90 - 50 * clamped)
  return `rgb(${r},${g},${b})`
}

export function computeViewModel(state: ExplorerState): ViewModel {
  const { bundle, query } = state
  const points = bundle.points
  const frontier = frontierPoints(bundle)
  const notices: string[] = []
  if (frontier.length === 0) notices.push('no frontier: every point is dominated')

  const xs = points.map((p) => p.reverted_area_mu)
  const ys = points.map((p) => p.electricity_kwh)
  const carbons = points.map((p) => p.carbon_kg)
  const habitats = points.map((p) => p.habitat_index)
  const [cLo, cHi] = extent(carbons)
  const [hLo, hHi] = extent(habitats)

  const plot: PlotPoint[] = points.map((p, i) => {
    const feasible =
      p.financial_burden <= query.budgetCap &&
      p.reverted_area_mu >= query.minRevertedAreaMu
    const ct = (carbons[i] - cLo) / (cHi - cLo || 1)
    const ht = (habitats[i] - hLo) / (hHi - hLo || 1)
    return {
      key: scenarioKey(p),
      x: p.reverted_area_mu,
      y: p.electricity_kwh,
      radius: 2.5 + 5.5 * ht,
      color: feasible ? carbonColor(ct) : '#c3c8cc',
      feasible,
      frontier: p.frontier,
      point: p,
    }
  })

  const recommendation = posteriorSelect(frontier, query)
  const [xLo, xHi] = extent(xs)
  const [yLo, yHi] = extent(ys)
  const grid: number[] = []
  for (let i = 0; i <= 40; i++) grid.push(yLo + ((yHi - yLo) * i) / 40)

  const budgetCurve = Number.isFinite(query.budgetCap)
    ? budgetLine(query.budgetCap, bundle.surrogates.g2g_budget,
                 bundle.surrogates.f2e_budget, grid, xHi * 1.05)
    : []

  // Iso-curves pass through the hovered point when one is selected, else
  // through the top recommendation.
  let habitatCurve: Array<[number, number]> = []
  let economyCurve: Array<[number, number]> = []
  const anchorKey = state.selected
  const anchor =
    (anchorKey && points.find((p) => scenarioKey(p) === anchorKey)) ||
    recommendation[0]?.point
  if (anchor) {
    const hLevel = evalSurrogate(bundle.surrogates.habitat,
                                 anchor.reverted_area_mu, anchor.electricity_kwh)
    const eLevel = evalSurrogate(bundle.surrogates.economy,
                                 anchor.reverted_area_mu, anchor.electricity_kwh)
    habitatCurve = indifferenceCurve(bundle.surrogates.habitat, hLevel, grid, xHi * 1.05)
    economyCurve = indifferenceCurve(bundle.surrogates.economy, eLevel, grid, xHi * 1.05)
  }

  if (recommendation.length === 0) {
    notices.push('no policy combination satisfies the current constraints')
  }
  return {
    plot,
    extent: { x: [xLo, xHi], y: [yLo, yHi] },
    recommendation,
    budgetCurve,
    targetX1: query.minRevertedAreaMu,
    habitatCurve,
    economyCurve,
    notices,
  }
}

// --- DOM rendering ----------------------------------------------------------

const SVG_NS = 'http://www.w3.org/2000/svg'
const WIDTH = 720
const HEIGHT = 480
const PAD = 48

function scaleFactory(vm: ViewModel) {
  const [xLo, xHi] = vm.extent.x
  const [yLo, yHi] = vm.extent.y
  return {
    sx: (x: number) => PAD + ((x - xLo) / (xHi - xLo || 1)) * (WIDTH - 2 * PAD),
    sy: (y: number) => HEIGHT - PAD - ((y - yLo) / (yHi - yLo || 1)) * (HEIGHT - 2 * PAD),
  }
}

function polyline(pointsAttr: string, stroke: string, dash = ''): SVGElement {
  const el = document.createElementNS(SVG_NS, 'polyline')
  el.setAttribute('points', pointsAttr)
  el.setAttribute('fill', 'none')
  el.setAttribute('stroke', stroke)
  el.setAttribute('stroke-width', '2')
  if (dash) el.setAttribute('stroke-dasharray', dash)
  return el
}

function curveAttr(curve: Array<[number, number]>,
                   s: { sx: (x: number) => number; sy: (y: number) => number }): string {
  return [...curve]
    .sort((a, b) => a[1] - b[1])
    .map(([x1, x2]) => `${s.sx(x1).toFixed(1)},${s.sy(x2).toFixed(1)}`)
    .join(' ')
}

export function renderView(vm: ViewModel, root: HTMLElement,
                           onHover?: (key: string | null) => void): void {
  root.textContent = ''

  const noticeBox = document.createElement('div')
  noticeBox.className = 'notices'
  for (const text of vm.notices) {
    const div = document.createElement('div')
    div.className = 'notice'
    div.textContent = text
    noticeBox.appendChild(div)
  }
  root.appendChild(noticeBox)

  const svg = document.createElementNS(SVG_NS, 'svg')
  svg.setAttribute('viewBox', `0 0 ${WIDTH} ${HEIGHT}`)
  svg.setAttribute('width', String(WIDTH))
  svg.setAttribute('height', String(HEIGHT))
  svg.setAttribute('role', 'img')
  const s = scaleFactory(vm)

  const axes = document.createElementNS(SVG_NS, 'path')
  axes.setAttribute('d',
    `M ${PAD} ${PAD} L ${PAD} ${HEIGHT - PAD} L ${WIDTH - PAD} ${HEIGHT - PAD}`)
  axes.setAttribute('stroke', '#555')
  axes.setAttribute('fill', 'none')
  svg.appendChild(axes)

  const xLabel = document.createElementNS(SVG_NS, 'text')
  xLabel.setAttribute('x', String(WIDTH / 2))
  xLabel.setAttribute('y', String(HEIGHT - 10))
  xLabel.setAttribute('text-anchor', 'middle')
  xLabel.setAttribute('class', 'axis-label')
  xLabel.textContent = 'reverted farmland area (Mu)'
  svg.appendChild(xLabel)

  const yLabel = document.createElementNS(SVG_NS, 'text')
  yLabel.setAttribute('transform', `translate(14 ${HEIGHT / 2}) rotate(-90)`)
  yLabel.setAttribute('text-anchor', 'middle')
  yLabel.setAttribute('class', 'axis-label')
  yLabel.textContent = 'electricity consumption (kWh)'
  svg.appendChild(yLabel)

  if (vm.budgetCurve.length > 1) {
    svg.appendChild(polyline(curveAttr(vm.budgetCurve, s), '#1558c0'))
  }
  if (vm.habitatCurve.length > 1) {
    svg.appendChild(polyline(curveAttr(vm.habitatCurve, s), '#2e7d32', '6 4'))
  }
  if (vm.economyCurve.length > 1) {
    svg.appendChild(polyline(curveAttr(vm.economyCurve, s), '#8e24aa', '2 4'))
  }
  if (Number.isFinite(vm.targetX1) && vm.targetX1 > 0) {
    const x = s.sx(vm.targetX1)
    const line = document.createElementNS(SVG_NS, 'line')
    line.setAttribute('x1', x.toFixed(1))
    line.setAttribute('x2', x.toFixed(1))
    line.setAttribute('y1', String(PAD))
    line.setAttribute('y2', String(HEIGHT - PAD))
    line.setAttribute('stroke', '#b00020')
    line.setAttribute('stroke-dasharray', '8 4')
    svg.appendChild(line)
  }

  const topKey = vm.recommendation.length
    ? scenarioKey(vm.recommendation[0].point) : null
  for (const p of vm.plot) {
    const circle = document.createElementNS(SVG_NS, 'circle')
    circle.setAttribute('cx', s.sx(p.x).toFixed(1))
    circle.setAttribute('cy', s.sy(p.y).toFixed(1))
    circle.setAttribute('r', p.radius.toFixed(1))
    circle.setAttribute('fill', p.color)
    circle.setAttribute('fill-opacity', p.feasible ? '0.9' : '0.35')
    circle.setAttribute('data-key', p.key)
    circle.setAttribute('class',
      'pt' + (p.frontier ? ' frontier' : '') + (p.key === topKey ? ' top' : ''))
    if (p.frontier) {
      circle.setAttribute('stroke', '#222')
      circle.setAttribute('stroke-width', p.key === topKey ? '3' : '1.5')
    }
    if (onHover) {
      circle.addEventListener('mouseenter', () => onHover(p.key))
      circle.addEventListener('mouseleave', () => onHover(null))
    }
    svg.appendChild(circle)
  }
  root.appendChild(svg)

  const table = document.createElement('table')
  table.className = 'recommendation'
  const head = table.insertRow()
  for (const text of ['rank', 'G2G (CNY/Mu)', 'F2E (CNY/kWh)', 'score',
                      'burden (CNY)', 'reverted (Mu)']) {
    const th = document.createElement('th')
    th.textContent = text
    head.appendChild(th)
  }
  vm.recommendation.slice(0, 10).forEach((r, i) => {
    const row = table.insertRow()
    const cells = [
      String(i + 1),
      String(r.point.g2g_compensation),
      r.point.f2e_price.toFixed(2),
      r.score.toFixed(4),
      r.point.financial_burden.toFixed(0),
      r.point.reverted_area_mu.toFixed(0),
    ]
    for (const text of cells) row.insertCell().textContent = text
  })
  root.appendChild(table)
}
