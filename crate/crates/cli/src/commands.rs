use std::path::{Path, PathBuf};
use std::sync::Arc;

use perdec::decompose::{decompose_product, k_periodic_decompose, search_difference_annihilator};
use perdec::eval::{self, Eval};
use perdec::json;
use perdec::sparse::{check_sparseness, fiber_extract, sparse_decompose, sparse_full, sparse_split2, SparsenessCheck};
use perdec::tiling::{cotiler_decompose, independent, select_periodizer, verify_cotiler, Independence, Tile};
use perdec::{ConfigView, Decomposition, Error, FiberSum, LaurentPoly, Region, Result, SubspaceBasis, WindowConfig};
use serde_json::{json, Value};

use crate::manifest::{Run, Status};
use crate::{Command, DecomposeArgs, Format, Options, PolyCmd, SparseCmd, TilingCmd};

pub fn dispatch(run: &mut Run, opts: &Options, cmd: &Command) -> Result<()> {
    let mut cx = Cx { run, opts };
    match cmd {
        Command::Poly(p) => cx.poly_cmd(p),
        Command::Act { poly, config } => cx.act(poly, config),
        Command::Decompose(args) => cx.decompose(args),
        Command::Sparse(s) => cx.sparse(s),
        Command::Tiling(t) => cx.tiling(t),
    }
}

struct Cx<'a> {
    run: &'a mut Run,
    opts: &'a Options,
}

fn vec_json(v: &perdec::IntVector) -> Value {
    json!(v.coords())
}

impl Cx<'_> {
    fn expect_dim(&self, d: usize) -> Result<()> {
        match self.opts.dim {
            Some(want) => Error::check_dim(want, d),
            None => Ok(()),
        }
    }

    fn poly(&mut self, path: &Path) -> Result<LaurentPoly> {
        let f = self.run.read(path, json::poly_from_json)?;
        self.expect_dim(f.dim())?;
        Ok(f)
    }

    fn config(&mut self, path: &Path) -> Result<ConfigView> {
        let c = self.run.read(path, json::config_from_json)?;
        self.expect_dim(c.dim())?;
        Ok(c)
    }

    fn tile(&mut self, path: &Path) -> Result<Tile> {
        let t = self.run.read(path, json::tile_from_json)?;
        self.expect_dim(t.dim())?;
        Ok(t)
    }

    /// A single polynomial, or an array of them.
    fn polys(&mut self, path: &Path) -> Result<Vec<LaurentPoly>> {
        let v = self.run.load(path)?;
        let parsed = match v.as_array() {
            Some(items) => items.iter().map(json::poly_from_json).collect(),
            None => json::poly_from_json(&v).map(|f| vec![f]),
        };
        let fs = parsed.map_err(|e| e.context(path.display().to_string()))?;
        for f in &fs {
            self.expect_dim(f.dim())?;
        }
        Ok(fs)
    }

    fn windows(&self, d: usize) -> Result<Vec<Region>> {
        if self.opts.windows.is_empty() {
            return Ok(vec![self.opts.bounds().check_region(d)]);
        }
        for w in &self.opts.windows {
            Error::check_dim(d, w.dim())?;
        }
        Ok(self.opts.windows.clone())
    }

    fn write_config(&mut self, stem: &str, c: &ConfigView) -> Result<()> {
        self.run.write_json(&format!("{stem}.json"), &json::config_to_json(c))?;
        if let ConfigView::Window(w) = c {
            self.grid(stem, w)?;
        }
        Ok(())
    }

    fn grid(&mut self, stem: &str, w: &WindowConfig) -> Result<()> {
        if self.opts.format == Format::Text {
            if let Some(text) = w.text_grid() {
                self.run.write(&format!("{stem}.txt"), &text)?;
            }
        }
        Ok(())
    }

    fn write_families(&mut self, families: &[FiberSum]) -> Result<()> {
        for (i, s) in families.iter().enumerate() {
            self.run.write_json(&format!("family-{}.json", i + 1), &json::fibers_to_json(s))?;
        }
        self.run.check("decomposition identities", Status::Pass, format!("{} families, verified exactly", families.len()));
        Ok(())
    }

    // -----------------------------------------------------------------------

    fn poly_cmd(&mut self, cmd: &PolyCmd) -> Result<()> {
        match cmd {
            PolyCmd::Add { f, g } | PolyCmd::Mul { f, g } => {
                let (f, g) = (self.poly(f)?, self.poly(g)?);
                let out = if matches!(cmd, PolyCmd::Add { .. }) {
                    f.try_add(&g)?
                } else {
                    f.try_mul(&g)?
                };
                self.run.write_json("result.json", &json::poly_to_json(&out))
            }
            PolyCmd::LineDir { f } => {
                let f = self.poly(f)?;
                let out = match f.line_direction() {
                    Some(l) => {
                        self.run.check("line direction", Status::Pass, format!("direction {}", l.direction));
                        json!({"direction": vec_json(&l.direction), "anchor": vec_json(&l.anchor)})
                    }
                    None => {
                        self.run.check("line direction", Status::Pass, "absent");
                        json!({"direction": null})
                    }
                };
                self.run.write_json("result.json", &out)
            }
        }
    }

    fn act(&mut self, poly: &Path, config: &Path) -> Result<()> {
        let f = self.poly(poly)?;
        let c = self.config(config)?;
        let out = c.apply_poly(&f)?;
        self.write_config("result", &out)
    }

    // -----------------------------------------------------------------------

    fn decompose(&mut self, args: &DecomposeArgs) -> Result<()> {
        let c = self.config(&args.config)?;
        let d = c.dim();
        let input: Eval = Arc::new(c);
        let bounds = self.opts.bounds();
        let dec = if let Some(k) = args.k {
            let mut candidates = Vec::new();
            for p in &args.periodizer {
                candidates.extend(self.polys(p)?);
            }
            k_periodic_decompose(&input, k, |v| select_periodizer(&candidates, v), &bounds)?
        } else {
            let path = args
                .annihilator
                .as_ref()
                .ok_or_else(|| Error::Invalid("pass --annihilator, or --k with --periodizer".into()))?;
            let fs = self.polys(path)?;
            let factors = match (fs.as_slice(), args.search) {
                ([f], true) => {
                    let dp = search_difference_annihilator(&input, f, bounds.search, &bounds.check_region(d))?;
                    self.run.check(
                        "annihilator search",
                        Status::Pass,
                        format!("difference vectors {:?}", dp.vectors()),
                    );
                    dp.factors()?
                }
                (_, true) => return Err(Error::Invalid("--search takes a single polynomial".into())),
                ([f], false) if !f.is_line_polynomial() => {
                    return Err(Error::Invalid(
                        "the annihilator is not a line polynomial; pass --search or an array of line factors".into(),
                    ))
                }
                _ => fs,
            };
            decompose_product(&factors, &input, &SubspaceBasis::trivial(d), &bounds)?
        };
        self.report_decomposition(&input, &dec)
    }

    fn report_decomposition(&mut self, input: &Eval, dec: &Decomposition) -> Result<()> {
        let d = input.dim();
        let windows = self.windows(d)?;
        let mut gauge = Vec::new();
        for comp in &dec.components {
            if let Ok((line, alphas)) = comp.annihilator.line_profile() {
                gauge.push(json!({"direction": vec_json(&line.direction), "band_width": alphas.len() - 1}));
            }
        }
        self.run.note(
            "gauge",
            json!({"rule": "zero on the band a1 in [0, n) of every coset line", "factors": gauge}),
        );
        for w in &windows {
            let report = dec.verify(input, w)?;
            let status = if report.sum_matches { Status::Pass } else { Status::Fail };
            self.run.check(format!("sum residual on {w}"), status, if report.sum_matches { "zero" } else { "nonzero" });
            for (i, v) in report.annihilated.iter().enumerate() {
                self.run.verdict(format!("component {} annihilated on {w}", i + 1), v);
            }
            for (i, v) in report.periodic.iter().enumerate() {
                self.run.verdict(format!("component {} periods on {w}", i + 1), v);
            }
        }
        for (i, comp) in dec.components.iter().enumerate() {
            let mut rasters = Vec::new();
            for (j, w) in windows.iter().enumerate() {
                let raster = eval::rasterize(comp.evaluator.as_ref(), w)?;
                self.grid(&format!("component-{}-window-{}", i + 1, j + 1), &raster)?;
                rasters.push(json::window_to_json(&raster));
            }
            let periods: Vec<Value> = comp.periods.iter().map(vec_json).collect();
            let doc = json!({
                "annihilator": json::poly_to_json(&comp.annihilator),
                "direction": vec_json(&comp.direction),
                "subspace": json::subspace_to_json(&comp.subspace),
                "periods": periods,
                "windows": rasters,
            });
            self.run.write_json(&format!("component-{}.json", i + 1), &doc)?;
        }
        Ok(())
    }

    // -----------------------------------------------------------------------

    fn sparse(&mut self, cmd: &SparseCmd) -> Result<()> {
        let bounds = self.opts.bounds();
        match cmd {
            SparseCmd::Check { config, a, m_max } => {
                let c = self.config(config)?;
                let doc = match check_sparseness(&c, *a, *m_max)? {
                    SparsenessCheck::Certified(cert) => {
                        let scope = if cert.exact { "for every m".to_string() } else { format!("for m <= {m_max}") };
                        self.run.check("sparseness", Status::Pass, format!("a = {a} holds {scope}"));
                        let ranges: Vec<Value> = cert.checked_ranges.iter().map(|(m, n)| json!([m, n])).collect();
                        json!({"certified": true, "constant_a": a, "exact": cert.exact, "checked_ranges": ranges})
                    }
                    SparsenessCheck::Violated { m, t, count } => {
                        self.run.check(
                            "sparseness",
                            Status::Fail,
                            format!("{count} support points in C_{m} + {t}, more than {}", a * m),
                        );
                        json!({"certified": false, "constant_a": a, "m": m, "t": vec_json(&t), "count": count})
                    }
                };
                self.run.write_json("sparseness.json", &doc)
            }
            SparseCmd::Fibers { config, direction } => {
                let c = self.config(config)?;
                let ex = fiber_extract(&c, direction, bounds.period)?;
                let detail = if ex.exact { "exact" } else { "window evidence" };
                self.run.check("fiber extraction", Status::Pass, detail);
                self.run.write_json("fibers.json", &json::fibers_to_json(&ex.fibers))
            }
            SparseCmd::Split { config, phi, psi } => {
                let c = self.config(config)?;
                let (phi, psi) = (self.poly(phi)?, self.poly(psi)?);
                let (a, b) = sparse_split2(&c, &phi, &psi, &bounds)?;
                self.write_families(&[a, b])
            }
            SparseCmd::Decompose { config, factors } => {
                let c = self.config(config)?;
                let phis = self.polys(factors)?;
                let parts = sparse_decompose(&c, &phis, &bounds)?;
                self.write_families(&parts)
            }
            SparseCmd::Full { config, annihilator } => {
                let c = self.config(config)?;
                let f = self.poly(annihilator)?;
                let parts = sparse_full(&c, &f, &bounds)?;
                self.write_families(&parts)
            }
        }
    }

    fn tiling(&mut self, cmd: &TilingCmd) -> Result<()> {
        match cmd {
            TilingCmd::Verify { tile, config } => {
                let t = self.tile(tile)?;
                let c = self.config(config)?;
                let v = verify_cotiler(&t, &c)?;
                self.run.verdict("co-tiler", &v);
                self.run.write_json("report.json", &json!({"cotiler": v.holds(), "verdict": v.to_string()}))
            }
            TilingCmd::Independent { tiles } => {
                let ts = self.tiles(tiles)?;
                let doc = match independent(&ts)? {
                    Independence::Independent => {
                        self.run.check("independence", Status::Pass, "every choice is independent");
                        json!({"independent": true})
                    }
                    Independence::Dependent { choice, relation } => {
                        let choice: Vec<Value> = choice.iter().map(vec_json).collect();
                        let relation: Vec<String> = relation.iter().map(|r| r.to_string()).collect();
                        self.run.check("independence", Status::Fail, format!("dependent choice {choice:?}"));
                        json!({"independent": false, "choice": choice, "relation": relation})
                    }
                };
                self.run.write_json("report.json", &doc)
            }
            TilingCmd::Decompose { config, tiles } => {
                let c = self.config(config)?;
                let ts = self.tiles(tiles)?;
                let dec = cotiler_decompose(&ts, &c, &self.opts.bounds())?;
                let input: Eval = Arc::new(c);
                self.report_decomposition(&input, &dec)
            }
        }
    }

    fn tiles(&mut self, paths: &[PathBuf]) -> Result<Vec<Tile>> {
        paths.iter().map(|p| self.tile(p)).collect()
    }
}
