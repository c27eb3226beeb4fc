//! Registries of bundle symbols and their graded Chern variables.
//!
//! A [`BundleContext`] fixes the variables a polynomial may mention, their
//! cohomological grades, and the truncation degrees. Variables are grouped into
//! *blocks* (for example "base classes" versus "tautological classes of one
//! Grassmann factor"); each block may carry its own grade cap on top of the
//! global truncation degree. Pushforwards preserve the grade of base-block
//! monomials, which is what makes per-block caps sound.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::GradedPoly;

pub const MAX_BLOCKS: usize = 8;

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedVar {
    pub symbol: Arc<str>,
    /// Chern index: the variable is `c_index(symbol)`.
    pub index: u32,
    pub grade: u32,
    pub block: usize,
}

impl GradedVar {
    pub fn name(&self) -> String {
        format!("c{}({})", self.index, self.symbol)
    }
}

#[derive(Clone, Debug)]
pub struct BundleSymbol {
    pub name: Arc<str>,
    pub rank: u32,
    /// Positions of `c_1 .. c_rank` in the context's variable list.
    pub vars: Vec<usize>,
    pub block: usize,
}

#[derive(Clone, Debug)]
pub struct Block {
    pub name: String,
    pub cap: Option<u32>,
}

pub struct BundleContext {
    id: u64,
    name: String,
    trunc: u32,
    vars: Vec<GradedVar>,
    symbols: Vec<BundleSymbol>,
    blocks: Vec<Block>,
}

impl fmt::Debug for BundleContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BundleContext")
            .field("name", &self.name)
            .field("trunc", &self.trunc)
            .field("symbols", &self.symbols.iter().map(|s| (&*s.name, s.rank)).collect::<Vec<_>>())
            .finish()
    }
}

impl BundleContext {
    pub fn builder(name: impl Into<String>, trunc: u32) -> ContextBuilder {
        ContextBuilder { name: name.into(), trunc, vars: Vec::new(), symbols: Vec::new(), blocks: Vec::new() }
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn vars(&self) -> &[GradedVar] {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn symbols(&self) -> &[BundleSymbol] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<&BundleSymbol> {
        self.symbols.iter().find(|s| &*s.name == name)
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    pub fn var_index(&self, symbol: &str, index: u32) -> Option<usize> {
        self.vars.iter().position(|v| &*v.symbol == symbol && v.index == index)
    }

    /// `c_index(symbol)` as a polynomial; `c_0 = 1` and indices above the rank give 0.
    pub fn chern_var(self: &Arc<Self>, symbol: &str, index: u32) -> Result<GradedPoly> {
        let sym = self.symbol(symbol).ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        Ok(match index {
            0 => GradedPoly::one(self),
            i if i > sym.rank => GradedPoly::zero(self),
            i => GradedPoly::var(self, sym.vars[i as usize - 1]),
        })
    }

    /// Total Chern class `1 + c_1 + ... + c_rank` of a registered symbol.
    pub fn total_chern(self: &Arc<Self>, symbol: &str) -> Result<GradedPoly> {
        let sym = self.symbol(symbol).ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        let mut p = GradedPoly::one(self);
        for &v in &sym.vars {
            p = p.add(&GradedPoly::var(self, v))?;
        }
        Ok(p)
    }

    /// Whether a grade profile (total grade, per-block grades) is retained.
    #[inline]
    pub fn fits(&self, total: u32, block_grades: &[u32; MAX_BLOCKS]) -> bool {
        if total > self.trunc {
            return false;
        }
        for (b, blk) in self.blocks.iter().enumerate() {
            if let Some(cap) = blk.cap {
                if block_grades[b] > cap {
                    return false;
                }
            }
        }
        true
    }

    /// A fresh context with the same symbols minus `drop`, and new truncation data.
    pub fn without_symbols(&self, name: &str, drop: &[&str], trunc: u32) -> Arc<BundleContext> {
        let mut b = BundleContext::builder(name, trunc);
        for blk in &self.blocks {
            b = b.block(&blk.name, blk.cap);
        }
        for s in &self.symbols {
            if !drop.contains(&&*s.name) {
                let blk = self.blocks[s.block].name.clone();
                b = b.bundle(&s.name, s.rank, &blk);
            }
        }
        b.build()
    }

    pub fn same(&self, other: &BundleContext) -> bool {
        self.id == other.id
    }
}

pub struct ContextBuilder {
    name: String,
    trunc: u32,
    vars: Vec<GradedVar>,
    symbols: Vec<BundleSymbol>,
    blocks: Vec<Block>,
}

impl ContextBuilder {
    pub fn block(mut self, name: &str, cap: Option<u32>) -> Self {
        if let Some(b) = self.blocks.iter_mut().find(|b| b.name == name) {
            b.cap = cap;
        } else {
            assert!(self.blocks.len() < MAX_BLOCKS, "too many variable blocks");
            self.blocks.push(Block { name: name.to_string(), cap });
        }
        self
    }

    pub fn set_cap(self, name: &str, cap: Option<u32>) -> Self {
        self.block(name, cap)
    }

    /// Registers a bundle symbol of the given rank with variables `c_1..c_rank`
    /// of grades `1..rank`.
    pub fn bundle(mut self, name: &str, rank: u32, block: &str) -> Self {
        assert!(self.symbols.iter().all(|s| &*s.name != name), "duplicate bundle symbol {name}");
        let block_idx = match self.blocks.iter().position(|b| b.name == block) {
            Some(i) => i,
            None => {
                self = self.block(block, None);
                self.blocks.len() - 1
            }
        };
        let sym: Arc<str> = Arc::from(name);
        let mut idx = Vec::with_capacity(rank as usize);
        for i in 1..=rank {
            idx.push(self.vars.len());
            self.vars.push(GradedVar { symbol: sym.clone(), index: i, grade: i, block: block_idx });
        }
        self.symbols.push(BundleSymbol { name: sym, rank, vars: idx, block: block_idx });
        self
    }

    pub fn build(self) -> Arc<BundleContext> {
        assert!(self.trunc < 256, "truncation degree must fit in an 8-bit exponent");
        Arc::new(BundleContext {
            id: NEXT_ID.fetch_add(1, Ordering::Relaxed),
            name: self.name,
            trunc: self.trunc,
            vars: self.vars,
            symbols: self.symbols,
            blocks: self.blocks,
        })
    }
}
