//! Cauchon diagrams, Cauchon graphs and the path families on them.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::straighten::Threshold;
use crate::torus::{Coord, Shape, TorusElement};

/// A black/white colouring of the `m×n` grid.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    shape: Shape,
    black: BTreeSet<Coord>,
}

#[derive(Serialize, Deserialize)]
struct DiagramWire {
    m: usize,
    n: usize,
    black: Vec<(usize, usize)>,
}

impl Diagram {
    pub fn new<I: IntoIterator<Item = Coord>>(shape: Shape, black: I) -> Result<Self> {
        let mut set = BTreeSet::new();
        for c in black {
            shape.check(c)?;
            set.insert(c);
        }
        Ok(Self { shape, black: set })
    }

    pub fn all_white(shape: Shape) -> Self {
        Self { shape, black: BTreeSet::new() }
    }

    pub fn all_black(shape: Shape) -> Self {
        Self { shape, black: shape.coords().collect() }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn black(&self) -> &BTreeSet<Coord> {
        &self.black
    }

    pub fn is_black(&self, c: Coord) -> bool {
        self.black.contains(&c)
    }

    pub fn is_white(&self, c: Coord) -> bool {
        self.shape.contains(c) && !self.black.contains(&c)
    }

    /// First black square with a white square both to its left and above.
    pub fn violation(&self) -> Option<Coord> {
        self.black.iter().copied().find(|&c| {
            let left = (1..c.col).any(|j| !self.is_black(Coord::new(c.row, j)));
            let above = (1..c.row).any(|i| !self.is_black(Coord::new(i, c.col)));
            left && above
        })
    }

    pub fn is_cauchon(&self) -> bool {
        self.violation().is_none()
    }

    /// Parses `#`/`.` rows separated by newlines or `/`.
    pub fn parse(text: &str) -> Result<Self> {
        let rows: Vec<&str> = text
            .split(['\n', '/'])
            .map(str::trim)
            .filter(|r| !r.is_empty())
            .collect();
        if rows.is_empty() {
            return Err(Error::Parse("empty diagram".into()));
        }
        let n = rows[0].chars().count();
        let mut black = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            if row.chars().count() != n {
                return Err(Error::Parse(format!("row {} has length {}, expected {n}", i + 1, row.chars().count())));
            }
            for (j, ch) in row.chars().enumerate() {
                match ch {
                    '#' => black.push(Coord::new(i + 1, j + 1)),
                    '.' => {}
                    other => return Err(Error::Parse(format!("unexpected character {other:?} in diagram"))),
                }
            }
        }
        Self::new(Shape::relaxed(rows.len(), n)?, black)
    }

    fn rows_text(&self) -> Vec<String> {
        (1..=self.shape.m)
            .map(|i| {
                (1..=self.shape.n)
                    .map(|j| if self.is_black(Coord::new(i, j)) { '#' } else { '.' })
                    .collect()
            })
            .collect()
    }

    /// One line per row.
    pub fn to_text(&self) -> String {
        self.rows_text().join("\n")
    }

    /// Rows joined by `/`.
    pub fn to_inline(&self) -> String {
        self.rows_text().join("/")
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(DiagramWire {
            m: self.shape.m,
            n: self.shape.n,
            black: self.black.iter().map(|c| (c.row, c.col)).collect(),
        })
        .expect("plain data")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let w: DiagramWire = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::new(Shape::relaxed(w.m, w.n)?, w.black.into_iter().map(|(i, j)| Coord::new(i, j)))
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_inline())
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Diagram({})", self.to_inline())
    }
}

/// All Cauchon diagrams of `shape`, in a fixed order.
///
/// Squares are coloured in lex order, white before black; a square may be
/// black only if its row prefix or column prefix is already all black, so
/// every partial colouring extends and nothing is filtered afterwards.
pub fn enumerate_cauchon_diagrams(shape: Shape) -> Vec<Diagram> {
    fn go(shape: Shape, idx: usize, black: &mut Vec<bool>, out: &mut Vec<Diagram>) {
        if idx == shape.size() {
            let set = (0..idx).filter(|&k| black[k]).map(|k| shape.coord_at(k)).collect();
            out.push(Diagram { shape, black: set });
            return;
        }
        let c = shape.coord_at(idx);
        black.push(false);
        go(shape, idx + 1, black, out);
        black.pop();
        let left = (1..c.col).all(|j| black[shape.index(Coord::new(c.row, j))]);
        let above = (1..c.row).all(|i| black[shape.index(Coord::new(i, c.col))]);
        if left || above {
            black.push(true);
            go(shape, idx + 1, black, out);
            black.pop();
        }
    }
    let mut out = Vec::new();
    go(shape, 0, &mut Vec::with_capacity(shape.size()), &mut out);
    out
}

/// A vertex of a Cauchon graph. Row, white and column vertices are
/// distinct variants, so labels never collide.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Row(usize),
    White(Coord),
    Col(usize),
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Row(i) => write!(f, "{i}"),
            Vertex::White(c) => write!(f, "{c}"),
            Vertex::Col(j) => write!(f, "{j}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeKind {
    /// White vertex to the nearest white vertex on its left.
    West,
    /// White vertex to the next white vertex below.
    South,
    /// Row vertex to the easternmost white vertex of its row.
    RowEntry,
    /// Southernmost white vertex of a column to the column vertex.
    ColExit,
}

impl EdgeKind {
    pub fn is_horizontal(self) -> bool {
        matches!(self, EdgeKind::West | EdgeKind::RowEntry)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Turn {
    /// Horizontal in, vertical out.
    Gamma,
    /// Vertical in, horizontal out.
    ReverseL,
}

/// A directed path given by its vertex sequence.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    vertices: Vec<Vertex>,
}

impl Path {
    pub fn new(vertices: Vec<Vertex>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn first(&self) -> Option<Vertex> {
        self.vertices.first().copied()
    }

    pub fn last(&self) -> Option<Vertex> {
        self.vertices.last().copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn is_disjoint(&self, other: &Path) -> bool {
        self.vertices.iter().all(|v| !other.contains(*v))
    }

    /// Parses `(1,(1,2),(2,2),2)`: a row index, white coordinates, and a
    /// column index.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("malformed path {text:?}"));
        let s = text.trim();
        let inner = s.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
        let mut items: Vec<String> = Vec::new();
        let mut depth = 0;
        let mut cur = String::new();
        for ch in inner.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth -= 1;
                    cur.push(ch);
                }
                ',' if depth == 0 => items.push(std::mem::take(&mut cur)),
                c if c.is_whitespace() => {}
                c => cur.push(c),
            }
        }
        items.push(cur);
        if items.len() < 3 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
        let last = items.len() - 1;
        let mut vertices = Vec::with_capacity(items.len());
        for (k, item) in items.iter().enumerate() {
            if k == 0 {
                vertices.push(Vertex::Row(num(item)?));
            } else if k == last {
                vertices.push(Vertex::Col(num(item)?));
            } else {
                let pair = item.strip_prefix('(').and_then(|s| s.strip_suffix(')')).ok_or_else(bad)?;
                let (a, b) = pair.split_once(',').ok_or_else(bad)?;
                vertices.push(Vertex::White(Coord::new(num(a)?, num(b)?)));
            }
        }
        Ok(Self { vertices })
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (k, v) in self.vertices.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Debug for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Path{self}")
    }
}

/// Pairwise vertex-disjoint paths joining `rows[k]` to `cols[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathSystem {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
    pub paths: Vec<Path>,
}

impl PathSystem {
    /// `w(P_1) ⋯ w(P_k)`.
    pub fn weight(&self, g: &CauchonGraph) -> Result<TorusElement> {
        let mut w = TorusElement::one(g.shape());
        for p in &self.paths {
            w = w.mul(&g.path_weight(p)?)?;
        }
        Ok(w)
    }

    /// `+1` at every Γ-turn and `-1` at every reverse-L turn of the system.
    pub fn turn_matrix(&self, g: &CauchonGraph) -> Result<crate::torus::ExponentMatrix> {
        let mut m = crate::torus::ExponentMatrix::zero(g.shape());
        for p in &self.paths {
            for (c, t) in g.turns(p)? {
                m.bump(c, if t == Turn::Gamma { 1 } else { -1 })?;
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PathSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.paths.iter().map(|p| p.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// The Cauchon graph of a Cauchon diagram with its standard embedding.
#[derive(Clone, Debug)]
pub struct CauchonGraph {
    diagram: Diagram,
    west: Vec<Option<Coord>>,
    south: Vec<Option<Vertex>>,
    row_entry: Vec<Option<Coord>>,
}

impl CauchonGraph {
    pub fn build(d: &Diagram) -> Result<Self> {
        if let Some(c) = d.violation() {
            return Err(Error::NotCauchon(c));
        }
        let shape = d.shape;
        let mut west = vec![None; shape.size()];
        let mut south = vec![None; shape.size()];
        let mut row_entry = vec![None; shape.m];
        for c in shape.coords().filter(|&c| d.is_white(c)) {
            west[shape.index(c)] = (1..c.col).rev().map(|j| Coord::new(c.row, j)).find(|&w| d.is_white(w));
            south[shape.index(c)] = Some(
                (c.row + 1..=shape.m)
                    .map(|i| Coord::new(i, c.col))
                    .find(|&w| d.is_white(w))
                    .map_or(Vertex::Col(c.col), Vertex::White),
            );
        }
        for i in 1..=shape.m {
            row_entry[i - 1] = (1..=shape.n).rev().map(|j| Coord::new(i, j)).find(|&w| d.is_white(w));
        }
        Ok(Self { diagram: d.clone(), west, south, row_entry })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn shape(&self) -> Shape {
        self.diagram.shape
    }

    pub fn white_vertices(&self) -> impl Iterator<Item = Coord> + '_ {
        self.shape().coords().filter(|&c| self.diagram.is_white(c))
    }

    /// Out-neighbours in increasing vertex order.
    pub fn out_neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let shape = self.shape();
        match v {
            Vertex::Row(i) if (1..=shape.m).contains(&i) => {
                self.row_entry[i - 1].map(Vertex::White).into_iter().collect()
            }
            Vertex::White(c) if self.diagram.is_white(c) => {
                let idx = shape.index(c);
                self.west[idx].map(Vertex::White).into_iter().chain(self.south[idx]).collect()
            }
            _ => Vec::new(),
        }
    }

    pub fn edge_kind(&self, u: Vertex, v: Vertex) -> Option<EdgeKind> {
        if !self.out_neighbors(u).contains(&v) {
            return None;
        }
        Some(match (u, v) {
            (Vertex::Row(_), _) => EdgeKind::RowEntry,
            (Vertex::White(_), Vertex::Col(_)) => EdgeKind::ColExit,
            (Vertex::White(a), Vertex::White(b)) if a.row == b.row => EdgeKind::West,
            _ => EdgeKind::South,
        })
    }

    /// Every edge, sorted by `(source, target)`.
    pub fn edges(&self) -> Vec<(Vertex, Vertex, EdgeKind)> {
        let shape = self.shape();
        let sources = (1..=shape.m)
            .map(Vertex::Row)
            .chain(self.white_vertices().map(Vertex::White));
        let mut out = Vec::new();
        for u in sources {
            for v in self.out_neighbors(u) {
                out.push((u, v, self.edge_kind(u, v).expect("listed edge")));
            }
        }
        out.sort_by_key(|e| (e.0, e.1));
        out
    }

    /// Checks that consecutive vertices are joined by edges.
    pub fn validate_path(&self, p: &Path) -> Result<()> {
        if p.vertices.is_empty() {
            return Err(Error::InvalidPath("empty path".into()));
        }
        for w in p.vertices.windows(2) {
            if self.edge_kind(w[0], w[1]).is_none() {
                return Err(Error::InvalidPath(format!("no edge {} -> {}", w[0], w[1])));
            }
        }
        let distinct: BTreeSet<_> = p.vertices.iter().collect();
        if distinct.len() != p.vertices.len() {
            return Err(Error::InvalidPath("repeated vertex".into()));
        }
        Ok(())
    }

    /// Turning vertices of a valid path, in path order.
    pub fn turns(&self, p: &Path) -> Result<Vec<(Coord, Turn)>> {
        self.validate_path(p)?;
        let vs = &p.vertices;
        let mut out = Vec::new();
        for k in 1..vs.len().saturating_sub(1) {
            let Vertex::White(c) = vs[k] else { continue };
            let din = self.edge_kind(vs[k - 1], vs[k]).expect("valid").is_horizontal();
            let dout = self.edge_kind(vs[k], vs[k + 1]).expect("valid").is_horizontal();
            match (din, dout) {
                (true, false) => out.push((c, Turn::Gamma)),
                (false, true) => out.push((c, Turn::ReverseL)),
                _ => {}
            }
        }
        Ok(out)
    }

    /// The edge weight `w(e)` as a torus element.
    pub fn edge_weight(&self, u: Vertex, v: Vertex) -> Result<TorusElement> {
        let shape = self.shape();
        let kind = self
            .edge_kind(u, v)
            .ok_or_else(|| Error::InvalidPath(format!("no edge {u} -> {v}")))?;
        Ok(match (kind, u, v) {
            (EdgeKind::West, Vertex::White(a), Vertex::White(b)) => {
                TorusElement::var_pow(shape, a, -1).mul(&TorusElement::var(shape, b))?
            }
            (EdgeKind::RowEntry, _, Vertex::White(b)) => TorusElement::var(shape, b),
            _ => TorusElement::one(shape),
        })
    }

    /// Product of edge weights along any valid path, including paths that
    /// start or end at white vertices.
    pub fn edge_product_weight(&self, p: &Path) -> Result<TorusElement> {
        self.validate_path(p)?;
        let mut w = TorusElement::one(self.shape());
        for e in p.vertices.windows(2) {
            w = w.mul(&self.edge_weight(e[0], e[1])?)?;
        }
        Ok(w)
    }

    /// Weight of a row-to-column path as the alternating product over its
    /// turns.
    pub fn path_weight(&self, p: &Path) -> Result<TorusElement> {
        match (p.first(), p.last()) {
            (Some(Vertex::Row(_)), Some(Vertex::Col(_))) => {}
            _ => return Err(Error::NotRowToColumn),
        }
        let shape = self.shape();
        let mut w = TorusElement::one(shape);
        for (c, t) in self.turns(p)? {
            let e = if t == Turn::Gamma { 1 } else { -1 };
            w = w.mul(&TorusElement::var_pow(shape, c, e))?;
        }
        Ok(w)
    }

    fn check_threshold(&self, th: &Threshold) -> Result<()> {
        if th.shape != self.shape() {
            return Err(Error::ShapeMismatch { left: self.shape(), right: th.shape });
        }
        Ok(())
    }

    fn check_row(&self, i: usize) -> Result<()> {
        if !(1..=self.shape().m).contains(&i) {
            return Err(Error::InvalidIndexSet);
        }
        Ok(())
    }

    fn check_col(&self, j: usize) -> Result<()> {
        if !(1..=self.shape().n).contains(&j) {
            return Err(Error::InvalidIndexSet);
        }
        Ok(())
    }

    /// Paths `i -> j` with no reverse-L turn at a vertex greater than
    /// `(r,s)`, in lexicographic order of vertex sequences.
    pub fn enumerate_gamma(&self, th: &Threshold, i: usize, j: usize) -> Result<Vec<Path>> {
        self.check_threshold(th)?;
        self.check_row(i)?;
        self.check_col(j)?;
        let mut out = Vec::new();
        let mut stack = vec![Vertex::Row(i)];
        self.gamma_dfs(th.rs, j, false, &mut stack, &mut out);
        Ok(out)
    }

    fn gamma_dfs(&self, rs: Coord, j: usize, came_vertical: bool, stack: &mut Vec<Vertex>, out: &mut Vec<Path>) {
        let v = *stack.last().expect("nonempty");
        if v == Vertex::Col(j) {
            out.push(Path::new(stack.clone()));
            return;
        }
        for w in self.out_neighbors(v) {
            let horizontal = match w {
                Vertex::White(c) => {
                    if c.col < j {
                        continue;
                    }
                    matches!(v, Vertex::Row(_)) || matches!(v, Vertex::White(a) if a.row == c.row)
                }
                Vertex::Col(k) => {
                    if k != j {
                        continue;
                    }
                    false
                }
                Vertex::Row(_) => continue,
            };
            if let Vertex::White(c) = v {
                if came_vertical && horizontal && c > rs {
                    continue;
                }
            }
            stack.push(w);
            self.gamma_dfs(rs, j, !horizontal, stack, out);
            stack.pop();
        }
    }

    /// `x_{i,j} = Σ_{P ∈ Γ(i,j)} w(P)`.
    pub fn generator(&self, th: &Threshold, i: usize, j: usize) -> Result<TorusElement> {
        let mut acc = TorusElement::zero(self.shape());
        for p in self.enumerate_gamma(th, i, j)? {
            acc = acc.add(&self.path_weight(&p)?)?;
        }
        Ok(acc)
    }

    /// All generators, row-major.
    pub fn generator_matrix(&self, th: &Threshold) -> Result<GeneratorMatrix> {
        let shape = self.shape();
        let entries = shape
            .coords()
            .map(|c| self.generator(th, c.row, c.col))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratorMatrix { shape, entries })
    }

    fn vertex_slot(&self, v: Vertex) -> usize {
        let shape = self.shape();
        match v {
            Vertex::Row(i) => i - 1,
            Vertex::White(c) => shape.m + shape.index(c),
            Vertex::Col(j) => shape.m + shape.size() + j - 1,
        }
    }

    fn index_sets(&self, rows: &[usize], cols: &[usize]) -> Result<()> {
        if rows.len() != cols.len() {
            return Err(Error::SizeMismatch { rows: rows.len(), cols: cols.len() });
        }
        let increasing = |s: &[usize]| !s.is_empty() && s.windows(2).all(|w| w[0] < w[1]);
        if !increasing(rows) || !increasing(cols) {
            return Err(Error::InvalidIndexSet);
        }
        rows.iter().try_for_each(|&i| self.check_row(i))?;
        cols.iter().try_for_each(|&j| self.check_col(j))
    }

    fn vdps_search(
        &self,
        th: &Threshold,
        rows: &[usize],
        cols: &[usize],
        first_only: bool,
    ) -> Result<Vec<PathSystem>> {
        self.check_threshold(th)?;
        self.index_sets(rows, cols)?;
        let families = rows
            .iter()
            .zip(cols)
            .map(|(&i, &j)| self.enumerate_gamma(th, i, j))
            .collect::<Result<Vec<_>>>()?;
        let mut occupied = vec![false; self.shape().m + self.shape().size() + self.shape().n];
        let mut chosen: Vec<usize> = Vec::with_capacity(rows.len());
        let mut out = Vec::new();
        self.vdps_backtrack(&families, &mut occupied, &mut chosen, first_only, &mut out);
        Ok(out
            .into_iter()
            .map(|picks: Vec<usize>| PathSystem {
                rows: rows.to_vec(),
                cols: cols.to_vec(),
                paths: picks.iter().enumerate().map(|(k, &p)| families[k][p].clone()).collect(),
            })
            .collect())
    }

    fn vdps_backtrack(
        &self,
        families: &[Vec<Path>],
        occupied: &mut [bool],
        chosen: &mut Vec<usize>,
        first_only: bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        let k = chosen.len();
        if k == families.len() {
            out.push(chosen.clone());
            return;
        }
        for (idx, p) in families[k].iter().enumerate() {
            if p.vertices.iter().any(|&v| occupied[self.vertex_slot(v)]) {
                continue;
            }
            for &v in &p.vertices {
                occupied[self.vertex_slot(v)] = true;
            }
            chosen.push(idx);
            self.vdps_backtrack(families, occupied, chosen, first_only, out);
            chosen.pop();
            for &v in &p.vertices {
                occupied[self.vertex_slot(v)] = false;
            }
            if first_only && !out.is_empty() {
                return;
            }
        }
    }

    /// All vertex-disjoint path systems from `rows` to `cols`.
    pub fn enumerate_vdps(&self, th: &Threshold, rows: &[usize], cols: &[usize]) -> Result<Vec<PathSystem>> {
        self.vdps_search(th, rows, cols, false)
    }

    /// Whether at least one vertex-disjoint path system exists.
    pub fn vdps_exists(&self, th: &Threshold, rows: &[usize], cols: &[usize]) -> Result<bool> {
        Ok(!self.vdps_search(th, rows, cols, true)?.is_empty())
    }

    fn extremal(&self, th: &Threshold, rows: &[usize], cols: &[usize], upper: bool) -> Result<PathSystem> {
        let family = self.enumerate_vdps(th, rows, cols)?;
        let combine = |p: &Path, q: &Path| if upper { path_u(p, q) } else { path_l(p, q) };
        let mut best = family.first().ok_or(Error::EmptyFamily)?.clone();
        for sys in &family[1..] {
            for (b, p) in best.paths.iter_mut().zip(&sys.paths) {
                *b = combine(b, p)?;
            }
        }
        if !family.contains(&best) {
            return Err(Error::InvalidPath(format!("envelope {best} is not a member of the family")));
        }
        for sys in &family {
            for (b, p) in best.paths.iter().zip(&sys.paths) {
                if &combine(b, p)? != b {
                    return Err(Error::InvalidPath(format!("envelope {best} is not extremal")));
                }
            }
        }
        Ok(best)
    }

    /// The system fixed by `U` against every member of the family.
    pub fn vdps_supremum(&self, th: &Threshold, rows: &[usize], cols: &[usize]) -> Result<PathSystem> {
        self.extremal(th, rows, cols, true)
    }

    /// The system fixed by `L` against every member of the family.
    pub fn vdps_infimum(&self, th: &Threshold, rows: &[usize], cols: &[usize]) -> Result<PathSystem> {
        self.extremal(th, rows, cols, false)
    }

    /// Graphviz text with `pos` attributes from the standard embedding.
    pub fn export_dot(&self) -> String {
        let shape = self.shape();
        let mut s = String::new();
        let name = |v: Vertex| match v {
            Vertex::Row(i) => format!("r{i}"),
            Vertex::White(c) => format!("w{}_{}", c.row, c.col),
            Vertex::Col(j) => format!("c{j}"),
        };
        writeln!(s, "digraph cauchon {{").unwrap();
        writeln!(s, "  // diagram {}", self.diagram.to_inline()).unwrap();
        writeln!(s, "  node [shape=circle, fontsize=10];").unwrap();
        for i in 1..=shape.m {
            writeln!(s, "  r{i} [label=\"{i}\", shape=box, pos=\"{},{}!\"];", shape.n + 1, -(i as i64)).unwrap();
        }
        for c in self.white_vertices() {
            writeln!(
                s,
                "  w{}_{} [label=\"({},{})\", pos=\"{},{}!\"];",
                c.row,
                c.col,
                c.row,
                c.col,
                c.col,
                -(c.row as i64)
            )
            .unwrap();
        }
        for j in 1..=shape.n {
            writeln!(s, "  c{j} [label=\"{j}\", shape=box, pos=\"{j},{}!\"];", -((shape.m + 1) as i64)).unwrap();
        }
        for (u, v, _) in self.edges() {
            writeln!(s, "  {} -> {};", name(u), name(v)).unwrap();
        }
        s.push_str("}\n");
        s
    }
}

/// Generator images `x_{i,j}` in the torus, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorMatrix {
    shape: Shape,
    entries: Vec<TorusElement>,
}

impl GeneratorMatrix {
    pub fn get(&self, c: Coord) -> &TorusElement {
        &self.entries[self.shape.index(c)]
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn entries(&self) -> &[TorusElement] {
        &self.entries
    }
}

fn edge_horizontal(u: Vertex, v: Vertex) -> bool {
    match (u, v) {
        (Vertex::Row(_), _) => true,
        (Vertex::White(a), Vertex::White(b)) => a.row == b.row,
        _ => false,
    }
}

fn combine(p: &Path, q: &Path, upper: bool) -> Result<Path> {
    if p.vertices.is_empty() || q.vertices.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    if p.first() != q.first() || p.last() != q.last() {
        return Err(Error::EndpointMismatch);
    }
    let qpos: HashMap<Vertex, usize> = q.vertices.iter().enumerate().map(|(k, v)| (*v, k)).collect();
    let common: Vec<(usize, usize)> = p
        .vertices
        .iter()
        .enumerate()
        .filter_map(|(k, v)| qpos.get(v).map(|&l| (k, l)))
        .collect();
    let mut out = vec![p.vertices[0]];
    for w in common.windows(2) {
        let (pa, qa) = w[0];
        let (pb, qb) = w[1];
        if qb <= qa {
            return Err(Error::InvalidPath("common vertices out of order".into()));
        }
        let pseg = &p.vertices[pa..=pb];
        let qseg = &q.vertices[qa..=qb];
        let take_p = if pseg == qseg {
            true
        } else {
            let p_above = edge_horizontal(pseg[0], pseg[1]);
            p_above == upper
        };
        let seg = if take_p { pseg } else { qseg };
        out.extend_from_slice(&seg[1..]);
    }
    Ok(Path::new(out))
}

/// Segment-wise upper combination of two paths with shared endpoints.
pub fn path_u(p: &Path, q: &Path) -> Result<Path> {
    combine(p, q, true)
}

/// Segment-wise lower combination of two paths with shared endpoints.
pub fn path_l(p: &Path, q: &Path) -> Result<Path> {
    combine(p, q, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(i: usize, j: usize) -> Coord {
        Coord::new(i, j)
    }

    #[test]
    fn cauchon_condition() {
        let s = Shape::new(2, 3).unwrap();
        let left = Diagram::new(s, [c(1, 1), c(2, 1), c(2, 3)]).unwrap();
        assert!(!left.is_cauchon());
        assert_eq!(left.violation(), Some(c(2, 3)));
        assert!(Diagram::all_white(s).is_cauchon());
        assert!(Diagram::all_black(s).is_cauchon());
        assert!(matches!(CauchonGraph::build(&left), Err(Error::NotCauchon(_))));
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_cauchon_diagrams(Shape::relaxed(1, 1).unwrap()).len(), 2);
        assert_eq!(enumerate_cauchon_diagrams(Shape::new(2, 2).unwrap()).len(), 14);
    }

    #[test]
    fn text_round_trip() {
        let d = Diagram::parse("#.#\n..#\n...").unwrap();
        assert_eq!(d.black().iter().copied().collect::<Vec<_>>(), vec![c(1, 1), c(1, 3), c(2, 3)]);
        assert_eq!(d.to_inline(), "#.#/..#/...");
        assert_eq!(Diagram::parse(&d.to_inline()).unwrap(), d);
        assert_eq!(Diagram::from_json(&d.to_json()).unwrap(), d);
        assert!(Diagram::parse("#./#").is_err());
        assert!(Diagram::parse("x.").is_err());
    }

    #[test]
    fn full_grid_graph() {
        let g = CauchonGraph::build(&Diagram::all_white(Shape::new(2, 2).unwrap())).unwrap();
        let edges = g.edges();
        assert_eq!(edges.iter().filter(|e| e.2 == EdgeKind::West).count(), 2);
        assert_eq!(edges.iter().filter(|e| e.2 == EdgeKind::South).count(), 2);
        assert_eq!(edges.len(), 8);
    }

    #[test]
    fn black_column_has_no_exit() {
        let s = Shape::new(2, 2).unwrap();
        let d = Diagram::new(s, [c(1, 1), c(2, 1)]).unwrap();
        let g = CauchonGraph::build(&d).unwrap();
        assert!(g.edges().iter().all(|e| e.1 != Vertex::Col(1)));
        assert!(g.export_dot().contains("c1 [label"));
    }

    #[test]
    fn path_parse_display() {
        let p = Path::parse("(1,(1,2),(2,2),(2,1),(3,1),1)").unwrap();
        assert_eq!(p.to_string(), "(1,(1,2),(2,2),(2,1),(3,1),1)");
        assert!(Path::parse("(1,2)").is_err());
    }

    #[test]
    fn u_and_l_basics() {
        let p = Path::parse("(1,(1,2),(1,1),(2,1),1)").unwrap();
        let q = Path::parse("(1,(1,2),(2,2),(2,1),1)").unwrap();
        assert_eq!(path_u(&p, &p).unwrap(), p);
        assert_eq!(path_u(&p, &q).unwrap(), p);
        assert_eq!(path_u(&q, &p).unwrap(), p);
        assert_eq!(path_l(&p, &q).unwrap(), q);
        let r = Path::parse("(2,(2,2),2)").unwrap();
        assert_eq!(path_u(&p, &r), Err(Error::EndpointMismatch));
    }
}
