//! Weight components of the Busemann cocycle and the Gromov product, and the
//! residuals of the identities they satisfy.
//!
//! Covectors are acted on by `theta -> theta o g^-1`.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::exterior::{exterior_power, frame_volume_ratio, wedge};
use crate::extended;
use crate::functional::Functional;
use crate::representation::ExteriorLift;
use crate::scaled::ScaledMatrix;
use crate::spectral::{gromov_pair, ExteriorTower, GAP_TOLERANCE};
use crate::words::CyclicWord;

/// Frames below this volume ratio count as degenerate.
const MIN_FRAME_VOLUME: f64 = 1e-12;

/// Flag data at a point, kept as unit wedges: for each level `k`, the
/// `k`-plane and the `k`-coplane as vectors in `Λ^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub levels: Vec<usize>,
    pub vectors: Vec<DVector<f64>>,
    pub covectors: Vec<DVector<f64>>,
}

fn unit_wedge(frame: &[DVector<f64>]) -> Result<DVector<f64>> {
    if frame_volume_ratio(frame)? < MIN_FRAME_VOLUME {
        return Err(Error::InvalidInput("degenerate frame".into()));
    }
    let w = wedge(frame)?;
    let n = w.norm();
    Ok(w / n)
}

impl BoundaryPoint {
    /// From explicit frames; `frames[i]` and `coframes[i]` span level `frames[i].len()`.
    pub fn from_frames(frames: &[Vec<DVector<f64>>], coframes: &[Vec<DVector<f64>>]) -> Result<Self> {
        if frames.len() != coframes.len() {
            return Err(Error::InvalidInput("frames and coframes differ in number".into()));
        }
        let mut point = BoundaryPoint { levels: vec![], vectors: vec![], covectors: vec![] };
        for (f, c) in frames.iter().zip(coframes) {
            if f.len() != c.len() {
                return Err(Error::InvalidInput("frame and coframe levels differ".into()));
            }
            point.levels.push(f.len());
            point.vectors.push(unit_wedge(f)?);
            point.covectors.push(unit_wedge(c)?);
        }
        Ok(point)
    }

    /// Attracting planes and repelling coplanes of an element.
    pub fn fixed_points(tower: &ExteriorTower, levels: &[usize]) -> Result<Self> {
        let mut point = BoundaryPoint { levels: vec![], vectors: vec![], covectors: vec![] };
        for &k in levels {
            let (v, theta) = tower.attracting(k, GAP_TOLERANCE)?;
            point.levels.push(k);
            point.vectors.push(v);
            point.covectors.push(theta);
        }
        Ok(point)
    }

    /// Gromov product weight components, one per stored level.
    pub fn gromov(&self) -> Result<Vec<f64>> {
        self.covectors.iter().zip(&self.vectors).map(|(t, v)| gromov_pair(t, v)).collect()
    }
}

/// `log |Λ^k g w| / |w|` for the wedge `w` of `v_frame`.
pub fn busemann_weight(g: &ScaledMatrix, v_frame: &[DVector<f64>], k: usize) -> Result<f64> {
    if v_frame.len() != k {
        return Err(Error::InvalidInput(format!("level {k} needs a {k}-frame, got {}", v_frame.len())));
    }
    let w = unit_wedge(v_frame)?;
    Ok(exterior_power(g, k)?.apply(&w)?.1)
}

/// The cocycle equation on a single level: `gk`, `hk` act on `Λ^k`, `w` is a
/// nonzero `k`-vector.
pub fn cocycle_residual_on_level(gk: &ScaledMatrix, hk: &ScaledMatrix, w: &DVector<f64>) -> Result<f64> {
    let ghk = gk.mul(hk)?;
    let (hw, bh) = hk.apply(w)?;
    let (_, bg) = gk.apply(&hw)?;
    let (_, bgh) = ghk.apply(w)?;
    Ok((bgh - bg - bh).abs())
}

/// `|B(gh, v) - B(g, h v) - B(h, v)|` at level `k`.
pub fn cocycle_identity_residual(
    g: &ScaledMatrix,
    h: &ScaledMatrix,
    v_frame: &[DVector<f64>],
    k: usize,
) -> Result<f64> {
    let gh = g.mul(h)?;
    let hv: Vec<DVector<f64>> = v_frame.iter().map(|v| h.unit() * v).collect();
    let lhs = busemann_weight(&gh, v_frame, k)?;
    Ok((lhs - busemann_weight(g, &hv, k)? - busemann_weight(h, v_frame, k)?).abs())
}

/// The Gromov product relation on a single level, with `gk` acting on `Λ^k`
/// and `theta`, `v` in `Λ^k`. The norms and the pairing are carried in
/// double-double; the four logarithms are combined into one ratio `q` with
/// `ln q` equal to the signed residual.
pub fn gromov_residual_on_level(gk: &ScaledMatrix, theta: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
    let m = gk.unit();
    let t = extended::lift(theta);
    let x = extended::lift(v);
    let pair = extended::dot(&t, &x);
    if pair.hi() == 0.0 {
        return Err(Error::Transversality(0.0));
    }
    // the scale exp(log_scale) cancels between theta o g^-1 and g v
    let gx = extended::mat_vec(m, &x);
    let tg = extended::solve_transpose(m, &t)?;
    let pair_img = extended::dot(&tg, &gx);
    let (nt, nx) = (extended::norm(&t), extended::norm(&x));
    let (ntg, ngx) = (extended::norm(&tg), extended::norm(&gx));
    let gr_img = extended::div(pair_img.abs(), ntg * ngx);
    let gr = extended::div(pair.abs(), nt * nx);
    let q = extended::div(gr_img, gr) * extended::div(ntg, nt) * extended::div(ngx, nx);
    Ok(extended::ln_near_one(q).abs())
}

/// `|Gr(theta o g^-1, g v) - Gr(theta, v) + log(|theta o g^-1| / |theta|) + log(|g v| / |v|)|`
/// at level `k`, for `k`-frames `theta_frame` and `v_frame`.
pub fn gromov_cocycle_residual(
    g: &ScaledMatrix,
    theta_frame: &[DVector<f64>],
    v_frame: &[DVector<f64>],
    k: usize,
) -> Result<f64> {
    if theta_frame.len() != k || v_frame.len() != k {
        return Err(Error::InvalidInput(format!("level {k} needs {k}-frames")));
    }
    let t = unit_wedge(theta_frame)?;
    let v = unit_wedge(v_frame)?;
    gromov_residual_on_level(&exterior_power(g, k)?, &t, &v)
}

/// `|B(g, attracting k-plane) - (lambda_1 + .. + lambda_k)|` for `g = rho(cls)`.
pub fn period_identity_residual(lift: &ExteriorLift, cls: &CyclicWord, k: usize) -> Result<f64> {
    let tower = ExteriorTower::from_word(lift, &cls.as_word())?;
    period_residual_of_tower(&tower, k)
}

pub fn period_residual_of_tower(tower: &ExteriorTower, k: usize) -> Result<f64> {
    let d = tower.dim();
    if k == 0 || k > d {
        return Err(Error::InvalidInput(format!("level {k} outside 1..={d}")));
    }
    let jordan = tower.jordan()?;
    let partial: f64 = jordan[..k].iter().sum();
    if k == d {
        return Ok((partial - tower.log_abs_det()).abs());
    }
    for level in 1..k {
        tower.attracting(level, GAP_TOLERANCE)?;
    }
    let (v, _) = tower.attracting(k, GAP_TOLERANCE)?;
    let (_, b) = tower.level(k).apply(&v)?;
    Ok((b - partial).abs())
}

/// The rotation of a class at which its fixed points are most transverse,
/// i.e. with the smallest `max_k |Gr_k|`; ties go to the first rotation.
#[derive(Clone, Debug)]
pub struct Representative {
    pub rotation: usize,
    pub tower: ExteriorTower,
    pub weights: Vec<Option<f64>>,
}

fn transversality_score(weights: &[Option<f64>]) -> f64 {
    if weights.iter().all(Option::is_none) {
        return f64::INFINITY;
    }
    weights.iter().flatten().fold(0.0_f64, |acc, w| acc.max(w.abs()))
}

pub fn transverse_representative(lift: &ExteriorLift, cls: &CyclicWord) -> Result<Representative> {
    let mut best: Option<(f64, Representative)> = None;
    for rotation in 0..cls.period() {
        let tower = ExteriorTower::from_word(lift, &cls.rotation(rotation))?;
        let weights = tower.gromov_weights(GAP_TOLERANCE)?;
        let score = transversality_score(&weights);
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, Representative { rotation, tower, weights }));
        }
    }
    best.map(|(_, r)| r).ok_or(Error::EmptyClass)
}

/// `phi` applied to the Gromov weights at the class's own fixed points,
/// read at its most transverse rotation so the value depends on the class only.
pub fn class_gromov(lift: &ExteriorLift, cls: &CyclicWord, phi: &Functional) -> Result<f64> {
    phi.check_dim(lift.dim())?;
    let rep = transverse_representative(lift, cls)?;
    gromov_of_representative(&rep, phi)
}

pub fn gromov_of_representative(rep: &Representative, phi: &Functional) -> Result<f64> {
    match phi.eval_weights(&rep.weights) {
        Some(v) => Ok(v),
        None => {
            let gaps = rep.tower.gaps()?;
            let level = phi
                .levels()
                .into_iter()
                .find(|&k| rep.weights[k - 1].is_none())
                .unwrap_or(1);
            Err(Error::NotProximal { level, gap: gaps[level - 1], tolerance: GAP_TOLERANCE })
        }
    }
}
