//! Pipeline configuration: every threshold in one place.
//!
//! The file format is line-oriented `key value` with `#` comments. Angles
//! are written in degrees in the file and held in radians internally.

use std::path::Path;

use crate::error::{Error, Result};
use crate::foe::RansacParams;
use crate::likelihood::LikelihoodParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    /// Priors strictly below this are static area.
    pub tau_static: f64,
    /// Camera moves when the static-area flow ratio strictly exceeds this.
    pub tau_move: f64,
    /// Magnitude above which a pixel "has flow" (ratio + static mean).
    pub eps_mag: f64,
    /// Magnitude floor for FoE geometry; at or below carries no evidence.
    pub min_mag: f64,
    /// Weight of the length factor in the likelihood.
    pub alpha: f64,
    /// Angle (radians) where the angle term reaches 0.5.
    pub theta_th: f64,
    /// RANSAC inlier threshold (radians).
    pub theta_inlier: f64,
    /// RANSAC iteration count.
    pub iterations: usize,
    /// RANSAC sampling seed.
    pub seed: u64,
    /// Posterior threshold for the pixel mask (inclusive).
    pub tau_pixel: f64,
    /// Moving-pixel fraction above which an instance is promoted (strict).
    pub tau_obj: f64,
    /// Static-camera fallback scale (pixels).
    pub m_stop: f64,
    /// Relative-length floor.
    pub eps_len: f64,
    /// Length-factor cap.
    pub fl_cap: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            tau_static: 0.3,
            tau_move: 0.1,
            eps_mag: 0.5,
            min_mag: 0.5,
            alpha: 0.25,
            theta_th: std::f64::consts::FRAC_PI_6,
            theta_inlier: std::f64::consts::FRAC_PI_6,
            iterations: 512,
            seed: 0,
            tau_pixel: 0.25,
            tau_obj: 0.01,
            m_stop: 1.0,
            eps_len: 1e-3,
            fl_cap: 4.0,
        }
    }
}

impl Config {
    pub fn ransac_params(&self) -> RansacParams {
        RansacParams {
            iterations: self.iterations,
            theta_inlier: self.theta_inlier,
            min_mag: self.min_mag,
            seed: self.seed,
            exhaustive: false,
        }
    }

    pub fn likelihood_params(&self) -> LikelihoodParams {
        LikelihoodParams {
            alpha: self.alpha,
            theta_th: self.theta_th,
            eps_len: self.eps_len,
            fl_cap: self.fl_cap,
            m_stop: self.m_stop,
            eps_mag: self.eps_mag,
            min_mag: self.min_mag,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn check(ok: bool, key: &'static str, value: f64, constraint: &'static str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::ConfigOutOfRange {
                    key,
                    value,
                    constraint,
                })
            }
        }
        check(
            self.tau_static > 0.0 && self.tau_static < 1.0,
            "tau_static",
            self.tau_static,
            "0 < tau_static < 1",
        )?;
        check(
            self.tau_move > 0.0 && self.tau_move < 1.0,
            "tau_move",
            self.tau_move,
            "0 < tau_move < 1",
        )?;
        check(self.eps_mag >= 0.0, "eps_mag", self.eps_mag, "eps_mag >= 0")?;
        check(self.min_mag >= 0.0, "min_mag", self.min_mag, "min_mag >= 0")?;
        check(self.alpha >= 0.0, "alpha", self.alpha, "alpha >= 0")?;
        check(
            self.theta_th > 0.0 && self.theta_th < std::f64::consts::PI,
            "theta_th",
            self.theta_th.to_degrees(),
            "0 < theta_th < 180 degrees",
        )?;
        check(
            self.theta_inlier > 0.0 && self.theta_inlier < std::f64::consts::PI,
            "theta_inlier",
            self.theta_inlier.to_degrees(),
            "0 < theta_inlier < 180 degrees",
        )?;
        check(
            self.iterations >= 1,
            "iterations",
            self.iterations as f64,
            "iterations >= 1",
        )?;
        check(
            self.tau_pixel > 0.0 && self.tau_pixel < 1.0,
            "tau_pixel",
            self.tau_pixel,
            "0 < tau_pixel < 1",
        )?;
        check(
            self.tau_obj >= 0.0 && self.tau_obj < 1.0,
            "tau_obj",
            self.tau_obj,
            "0 <= tau_obj < 1",
        )?;
        check(self.m_stop > 0.0, "m_stop", self.m_stop, "m_stop > 0")?;
        check(self.eps_len > 0.0, "eps_len", self.eps_len, "eps_len > 0")?;
        check(self.fl_cap > 0.0, "fl_cap", self.fl_cap, "fl_cap > 0")?;
        Ok(())
    }

    /// Applies `key value` lines over the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let mut tokens = content.split_whitespace();
            let key = tokens.next().unwrap();
            let value = tokens
                .next()
                .ok_or_else(|| Error::parse(line, format!("missing value for `{key}`")))?;
            if tokens.next().is_some() {
                return Err(Error::parse(line, format!("trailing tokens after `{key}`")));
            }
            let fval = || -> Result<f64> {
                value
                    .parse()
                    .map_err(|_| Error::parse(line, format!("bad number `{value}`")))
            };
            match key {
                "tau_static" => self.tau_static = fval()?,
                "tau_move" => self.tau_move = fval()?,
                "eps_mag" => self.eps_mag = fval()?,
                "min_mag" => self.min_mag = fval()?,
                "alpha" => self.alpha = fval()?,
                "theta_th" => self.theta_th = fval()?.to_radians(),
                "theta_inlier" => self.theta_inlier = fval()?.to_radians(),
                "iterations" => {
                    self.iterations = value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad count `{value}`")))?
                }
                "seed" => {
                    self.seed = value
                        .parse()
                        .map_err(|_| Error::parse(line, format!("bad seed `{value}`")))?
                }
                "tau_pixel" => self.tau_pixel = fval()?,
                "tau_obj" => self.tau_obj = fval()?,
                "m_stop" => self.m_stop = fval()?,
                "eps_len" => self.eps_len = fval()?,
                "fl_cap" => self.fl_cap = fval()?,
                other => return Err(Error::parse(line, format!("unknown key `{other}`"))),
            }
        }
        self.validate()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Config::default();
        cfg.apply_text(&std::fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    /// Re-parseable `key value` dump (angles back in degrees).
    pub fn to_text(&self) -> String {
        format!(
            "tau_static {}\ntau_move {}\neps_mag {}\nmin_mag {}\nalpha {}\ntheta_th {}\ntheta_inlier {}\niterations {}\nseed {}\ntau_pixel {}\ntau_obj {}\nm_stop {}\neps_len {}\nfl_cap {}\n",
            self.tau_static,
            self.tau_move,
            self.eps_mag,
            self.min_mag,
            self.alpha,
            self.theta_th.to_degrees(),
            self.theta_inlier.to_degrees(),
            self.iterations,
            self.seed,
            self.tau_pixel,
            self.tau_obj,
            self.m_stop,
            self.eps_len,
            self.fl_cap,
        )
    }
}
