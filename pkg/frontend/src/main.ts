/** Entry point: control wiring around the pure view pipeline. */

import { parseBundle, BundleFormatError } from './model'
import { computeViewModel, renderView } from './view'
import type { ExplorerBundle, ExplorerState } from './types'
import './style.css'

const app = document.getElementById('app') as HTMLElement

let state: ExplorerState | null = null

function rerender(): void {
  if (!state) return
  const plotRoot = document.getElementById('plot') as HTMLElement
  const vm = computeViewModel(state)
  renderView(vm, plotRoot, (key) => {
    if (!state) return
    if (state.selected !== key) {
      state.selected = key
      rerender()
    }
  })
}

function showError(message: string): void {
  const box = document.getElementById('error') as HTMLElement
  box.textContent = message
  box.style.display = message ? 'block' : 'none'
}

function normalizedWeights(raw: { carbon: number; habitat: number; economy: number }) {
  const total = raw.carbon + raw.habitat + raw.economy
  if (total <= 0) return { carbon: 1 / 3, habitat: 1 / 3, economy: 1 / 3 }
  return {
    carbon: raw.carbon / total,
    habitat: raw.habitat / total,
    economy: raw.economy / total,
  }
}

function readControls(): void {
  if (!state) return
  const budget = Number((document.getElementById('budget') as HTMLInputElement).value)
  const minArea = Number((document.getElementById('min-area') as HTMLInputElement).value)
  const weights = normalizedWeights({
    carbon: Number((document.getElementById('w-carbon') as HTMLInputElement).value),
    habitat: Number((document.getElementById('w-habitat') as HTMLInputElement).value),
    economy: Number((document.getElementById('w-economy') as HTMLInputElement).value),
  })
  state.query = {
    // a zero budget is an impossible cap: everything is infeasible
    budgetCap: budget > 0 ? budget : -Infinity,
    minRevertedAreaMu: Math.max(0, minArea),
    weights,
  }
  const label = document.getElementById('weight-readout') as HTMLElement
  label.textContent =
    `carbon ${weights.carbon.toFixed(2)} / habitat ${weights.habitat.toFixed(2)}` +
    ` / economy ${weights.economy.toFixed(2)}`
  rerender()
}

function adoptBundle(bundle: ExplorerBundle): void {
  state = {
    bundle,
    query: {
      budgetCap: bundle.defaults.budget_cap,
      minRevertedAreaMu: bundle.defaults.min_reverted_area_mu,
      weights: bundle.defaults.weights,
    },
    selected: null,
  }
  ;(document.getElementById('budget') as HTMLInputElement).value =
    String(bundle.defaults.budget_cap)
  ;(document.getElementById('min-area') as HTMLInputElement).value =
    String(bundle.defaults.min_reverted_area_mu)
  ;(document.getElementById('w-carbon') as HTMLInputElement).value =
    String(bundle.defaults.weights.carbon)
  ;(document.getElementById('w-habitat') as HTMLInputElement).value =
    String(bundle.defaults.weights.habitat)
  ;(document.getElementById('w-economy') as HTMLInputElement).value =
    String(bundle.defaults.weights.economy)
  showError('')
  const meta = document.getElementById('meta') as HTMLElement
  meta.textContent =
    `${bundle.points.length} scenarios, config ${bundle.config_hash.slice(0, 12)}` +
    (bundle.reference_year ? `, reference year ${bundle.reference_year}` : '')
  rerender()
}

function loadText(text: string): void {
  try {
    adoptBundle(parseBundle(text))
  } catch (err) {
    if (err instanceof BundleFormatError) {
      showError(err.message)
    } else {
      showError(`failed to load bundle: ${(err as Error).message}`)
    }
  }
}

function wire(): void {
  for (const id of ['budget', 'min-area', 'w-carbon', 'w-habitat', 'w-economy']) {
    document.getElementById(id)?.addEventListener('input', readControls)
  }
  const fileInput = document.getElementById('bundle-file') as HTMLInputElement
  fileInput.addEventListener('change', () => {
    const file = fileInput.files?.[0]
    if (!file) return
    file.text().then(loadText, (err) => showError(String(err)))
  })
  fetch('bundle.json')
    .then((res) => (res.ok ? res.text() : Promise.reject(new Error(res.statusText))))
    .then(loadText)
    .catch(() => showError('no bundle.json next to the app; load one with the file picker'))
}

if (app) wire()
