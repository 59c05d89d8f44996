use super::RankOneTensor;
use crate::{Error, Result};

/// One logged evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub point: Vec<f64>,
    pub value: f64,
}

/// Evaluation access to a hidden tensor that counts (and optionally logs) every
/// query. Once the budget is spent further queries fail instead of returning a
/// value.
///
/// An oracle is single-owner mutable state; run one oracle per thread.
#[derive(Debug)]
pub struct QueryOracle<'a> {
    target: &'a RankOneTensor,
    count: u64,
    budget: Option<u64>,
    log: Option<Vec<Query>>,
}

impl<'a> QueryOracle<'a> {
    pub fn new(target: &'a RankOneTensor) -> Self {
        Self {
            target,
            count: 0,
            budget: None,
            log: None,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(Vec::new());
        self
    }

    /// `f(x)`, counted against the budget.
    pub fn evaluate(&mut self, x: &[f64]) -> Result<f64> {
        self.target.check_point(x)?;
        if let Some(budget) = self.budget {
            if self.count >= budget {
                return Err(Error::BudgetExhausted { budget });
            }
        }
        self.count += 1;
        let value = self.target.eval(x);
        if let Some(log) = self.log.as_mut() {
            log.push(Query {
                point: x.to_vec(),
                value,
            });
        }
        Ok(value)
    }

    pub fn dim(&self) -> usize {
        self.target.dim()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Queries left before the budget is exhausted (`None` when unbounded).
    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b.saturating_sub(self.count))
    }

    pub fn log(&self) -> Option<&[Query]> {
        self.log.as_deref()
    }

    /// Direct access to the hidden function. Only white-box baselines use this;
    /// it bypasses the accounting on purpose.
    pub fn target(&self) -> &'a RankOneTensor {
        self.target
    }
}
