//! Composite Gauss–Legendre grids on the support of the potential.

use crate::quadrature::gauss_legendre_on;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    /// Index of the first node of this panel.
    pub start: usize,
    pub len: usize,
}

/// Panels split at every breakpoint, each carrying its own Gauss–Legendre rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    panels: Vec<Panel>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_of: Vec<usize>,
}

impl Grid {
    /// Grid with no nodes, used for the zero potential.
    pub fn empty() -> Self {
        Grid { panels: Vec::new(), nodes: Vec::new(), weights: Vec::new(), panel_of: Vec::new() }
    }

    /// Partition [x_min, x_max] at the interior `breakpoints`, then split each
    /// piece into equal panels no wider than `max_width`.
    pub fn build(x_min: f64, x_max: f64, breakpoints: &[f64], nodes_per_panel: usize, max_width: f64) -> Self {
        assert!(x_min < x_max, "empty grid interval");
        assert!(nodes_per_panel >= 1 && max_width > 0.0);
        let mut cuts = vec![x_min];
        let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&p| p > x_min && p < x_max).collect();
        inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
        inner.dedup();
        cuts.extend(inner);
        cuts.push(x_max);

        let mut grid = Grid::empty();
        for w in cuts.windows(2) {
            let pieces = ((w[1] - w[0]) / max_width).ceil().max(1.0) as usize;
            let h = (w[1] - w[0]) / pieces as f64;
            for p in 0..pieces {
                let a = w[0] + p as f64 * h;
                let b = if p + 1 == pieces { w[1] } else { a + h };
                let (x, wt) = gauss_legendre_on(nodes_per_panel, a, b);
                let start = grid.nodes.len();
                grid.panel_of.extend(std::iter::repeat(grid.panels.len()).take(x.len()));
                grid.panels.push(Panel { a, b, start, len: x.len() });
                grid.nodes.extend(x);
                grid.weights.extend(wt);
            }
        }
        grid
    }

    /// The same panel layout with `factor` times as many nodes per panel.
    pub fn refined(&self, factor: usize) -> Self {
        let mut grid = Grid::empty();
        for p in &self.panels {
            let (x, wt) = gauss_legendre_on(p.len * factor, p.a, p.b);
            let start = grid.nodes.len();
            grid.panel_of.extend(std::iter::repeat(grid.panels.len()).take(x.len()));
            grid.panels.push(Panel { a: p.a, b: p.b, start, len: x.len() });
            grid.nodes.extend(x);
            grid.weights.extend(wt);
        }
        grid
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> &[Panel] {
        &self.panels
    }

    pub fn panel_of(&self, q: usize) -> usize {
        self.panel_of[q]
    }

    pub fn x_min(&self) -> f64 {
        self.panels.first().map_or(f64::NAN, |p| p.a)
    }

    pub fn x_max(&self) -> f64 {
        self.panels.last().map_or(f64::NAN, |p| p.b)
    }
}
