//! Panoptic label maps and class-conditioned prior moving probabilities.
//!
//! A panoptic map carries a semantic class id and an instance id per pixel
//! (instance 0 = uninstanced "stuff"). The class-prior table maps each class
//! id to a prior probability that pixels of that class belong to a movable
//! object, plus a flag marking sky classes; sky pixels get their flow
//! invalidated before any motion analysis because flow estimates there are
//! meaningless.

use std::collections::HashMap;
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pgm;
use crate::types::{BinaryMask, ProbabilityMap};

/// Per-pixel semantic class id + instance id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PanopticMap {
    width: usize,
    height: usize,
    class_id: Vec<u16>,
    instance_id: Vec<u16>,
}

impl PanopticMap {
    pub fn new(width: usize, height: usize, class_id: Vec<u16>, instance_id: Vec<u16>) -> Self {
        let n = width * height;
        assert!(n > 0, "panoptic map must be non-empty");
        assert_eq!(class_id.len(), n);
        assert_eq!(instance_id.len(), n);
        Self {
            width,
            height,
            class_id,
            instance_id,
        }
    }

    /// Uniform map: one class everywhere, no instances.
    pub fn uniform(width: usize, height: usize, class_id: u16) -> Self {
        Self::new(
            width,
            height,
            vec![class_id; width * height],
            vec![0; width * height],
        )
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.class_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_id.is_empty()
    }

    #[inline]
    pub fn class(&self, idx: usize) -> u16 {
        self.class_id[idx]
    }

    #[inline]
    pub fn instance(&self, idx: usize) -> u16 {
        self.instance_id[idx]
    }

    pub fn set(&mut self, idx: usize, class_id: u16, instance_id: u16) {
        self.class_id[idx] = class_id;
        self.instance_id[idx] = instance_id;
    }

    pub fn same_dims(&self, width: usize, height: usize) -> Result<()> {
        if self.width != width || self.height != height {
            return Err(Error::dims((width, height), (self.width, self.height)));
        }
        Ok(())
    }

    /// Loads the two-file representation: 16-bit PGM class map + instance map.
    pub fn load(class_path: &Path, instance_path: &Path) -> Result<Self> {
        let class = pgm::read_pgm(std::fs::File::open(class_path)?)?;
        let inst = pgm::read_pgm(std::fs::File::open(instance_path)?)?;
        if class.width != inst.width || class.height != inst.height {
            return Err(Error::dims(
                (class.width, class.height),
                (inst.width, inst.height),
            ));
        }
        Ok(Self::new(class.width, class.height, class.data, inst.data))
    }

    pub fn save(&self, class_path: &Path, instance_path: &Path) -> Result<()> {
        pgm::write_pgm16(
            std::fs::File::create(class_path)?,
            self.width,
            self.height,
            &self.class_id,
        )?;
        pgm::write_pgm16(
            std::fs::File::create(instance_path)?,
            self.width,
            self.height,
            &self.instance_id,
        )
    }
}

/// One class-table entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPrior {
    pub prior: f64,
    pub is_sky: bool,
    pub name: String,
}

/// Class id -> prior moving probability and sky flag.
#[derive(Debug, Clone, Default)]
pub struct ClassPriorTable {
    entries: HashMap<u16, ClassPrior>,
}

impl ClassPriorTable {
    /// Built-in table covering the 133 COCO panoptic categories.
    pub fn default_coco() -> Self {
        load_class_table(DEFAULT_COCO_TABLE.as_bytes())
            .expect("bundled class table must parse")
    }

    pub fn get(&self, class_id: u16) -> Result<&ClassPrior> {
        self.entries
            .get(&class_id)
            .ok_or(Error::UnknownClass { id: class_id })
    }

    pub fn contains(&self, class_id: u16) -> bool {
        self.entries.contains_key(&class_id)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn insert(&mut self, class_id: u16, entry: ClassPrior) -> Result<()> {
        if !(0.0..=1.0).contains(&entry.prior) {
            return Err(Error::PriorOutOfRange {
                id: class_id,
                prior: entry.prior,
            });
        }
        if self.entries.insert(class_id, entry).is_some() {
            return Err(Error::DuplicateClass { id: class_id });
        }
        Ok(())
    }
}

const DEFAULT_COCO_TABLE: &str = include_str!("../data/coco_panoptic_priors.txt");

/// Parses the line-oriented table format:
/// `<class_id> <prior> <sky|-> <name>`, `#` comments, blank lines ignored.
pub fn load_class_table<R: Read>(mut r: R) -> Result<ClassPriorTable> {
    let mut text = String::new();
    r.read_to_string(&mut text)?;
    let mut table = ClassPriorTable::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() < 4 {
            return Err(Error::parse(
                line,
                format!("expected `<class_id> <prior> <sky|-> <name>`, got `{content}`"),
            ));
        }
        let class_id: u16 = tokens[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad class id `{}`", tokens[0])))?;
        let prior: f64 = tokens[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad prior `{}`", tokens[1])))?;
        if !(0.0..=1.0).contains(&prior) {
            return Err(Error::PriorOutOfRange {
                id: class_id,
                prior,
            });
        }
        let is_sky = match tokens[2] {
            "sky" => true,
            "-" => false,
            other => {
                return Err(Error::parse(
                    line,
                    format!("expected `sky` or `-`, got `{other}`"),
                ))
            }
        };
        let name = tokens[3..].join(" ");
        if table
            .entries
            .insert(
                class_id,
                ClassPrior {
                    prior,
                    is_sky,
                    name,
                },
            )
            .is_some()
        {
            return Err(Error::DuplicateClass { id: class_id });
        }
    }
    Ok(table)
}

pub fn load_class_table_file(path: &Path) -> Result<ClassPriorTable> {
    load_class_table(std::fs::File::open(path)?)
}

/// Per-pixel prior moving probability looked up by class id.
pub fn prior_map(seg: &PanopticMap, table: &ClassPriorTable) -> Result<ProbabilityMap> {
    let mut data = Vec::with_capacity(seg.len());
    for idx in 0..seg.len() {
        data.push(table.get(seg.class(idx))?.prior);
    }
    let mut it = data.into_iter();
    Ok(ProbabilityMap::from_fn(seg.width(), seg.height(), |_, _| {
        it.next().unwrap()
    }))
}

/// Pixels whose prior falls strictly below `tau_static`.
pub fn static_mask(prior: &ProbabilityMap, tau_static: f64) -> BinaryMask {
    BinaryMask::from_fn(prior.width(), prior.height(), |x, y| {
        prior.at(x, y) < tau_static
    })
}

/// Pixels of sky classes; callers clear flow validity there before analysis.
pub fn sky_mask(seg: &PanopticMap, table: &ClassPriorTable) -> Result<BinaryMask> {
    let mut mask = BinaryMask::new(seg.width(), seg.height());
    for idx in 0..seg.len() {
        mask.set(idx, table.get(seg.class(idx))?.is_sky);
    }
    Ok(mask)
}
