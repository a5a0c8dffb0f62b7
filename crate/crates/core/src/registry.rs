//! Named strategies selected at run time: evaluation engines, oracles and
//! baselines.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gensym::{
    Baseline, GeneralizedEngine, GeneralizedSeries, HestonBaseline, Recursion, VasicekBaseline,
    ZeroBaseline,
};
use crate::oracle::{
    auto_oracle, closed_form_oracle, CirOracle, HestonOracle, IntegratorConfig, LevyOracle, Oracle,
    RiccatiOracle, VasicekOracle,
};
use crate::series::{BetaRule, CfEngine, GlobalEngine, LocalEngine, PlainSeries, DEFAULT_ORDER};
use crate::symbol::AffineModel;

/// Name-to-factory map for one kind of strategy.
pub struct Registry<F: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<String, Arc<F>>,
}

impl<F: ?Sized> Registry<F> {
    pub fn new(kind: &'static str) -> Self {
        Registry {
            kind,
            entries: BTreeMap::new(),
        }
    }

    /// Add or replace an entry.
    pub fn register(&mut self, name: impl Into<String>, factory: Arc<F>) {
        self.entries.insert(name.into(), factory);
    }

    pub fn get(&self, name: &str) -> Result<&Arc<F>> {
        self.entries
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.into(),
                available: self.names().join(", "),
            })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> Vec<String> {
        self.entries.keys().cloned().collect()
    }
}

/// Everything an engine factory may need.
#[derive(Clone)]
pub struct EngineContext {
    pub model: Arc<AffineModel>,
    pub order: usize,
    pub beta: BetaRule,
    pub baseline: Option<Arc<dyn Baseline>>,
    pub recursion: Recursion,
}

impl EngineContext {
    pub fn new(model: Arc<AffineModel>) -> Self {
        EngineContext {
            model,
            order: DEFAULT_ORDER,
            beta: BetaRule::Auto,
            baseline: None,
            recursion: Recursion::Difference,
        }
    }
}

pub type EngineFactory = dyn Fn(&EngineContext) -> Result<Box<dyn CfEngine>> + Send + Sync;
pub type OracleFactory =
    dyn Fn(Arc<AffineModel>, IntegratorConfig) -> Result<Box<dyn Oracle>> + Send + Sync;
pub type BaselineFactory = dyn Fn(&AffineModel) -> Result<Arc<dyn Baseline>> + Send + Sync;

pub struct Strategies {
    pub engines: Registry<EngineFactory>,
    pub oracles: Registry<OracleFactory>,
    pub baselines: Registry<BaselineFactory>,
}

impl Strategies {
    /// Built-in engines `local`, `global`, `generalized`; oracles `auto`,
    /// `closed`, `levy`, `vasicek`, `cir`, `heston`, `riccati`; baselines
    /// `zero`, `vasicek`, `heston`.
    pub fn builtin() -> Self {
        let mut engines: Registry<EngineFactory> = Registry::new("engine");
        engines.register(
            "local",
            Arc::new(|c: &EngineContext| {
                let s = Arc::new(PlainSeries::build(c.model.clone(), c.order));
                Ok(Box::new(LocalEngine::new(s)) as Box<dyn CfEngine>)
            }),
        );
        engines.register(
            "global",
            Arc::new(|c: &EngineContext| {
                let s = Arc::new(PlainSeries::build(c.model.clone(), c.order));
                Ok(Box::new(GlobalEngine::new(s, c.beta)?) as Box<dyn CfEngine>)
            }),
        );
        engines.register(
            "generalized",
            Arc::new(|c: &EngineContext| {
                let b = c.baseline.clone().ok_or_else(|| {
                    Error::Contract("the generalized engine needs a baseline".into())
                })?;
                let s = GeneralizedSeries::build(c.model.clone(), b, c.order, c.recursion)?;
                Ok(Box::new(GeneralizedEngine::new(Arc::new(s))?) as Box<dyn CfEngine>)
            }),
        );

        let mut oracles: Registry<OracleFactory> = Registry::new("oracle");
        oracles.register("auto", Arc::new(|m, c| Ok(auto_oracle(m, c))));
        oracles.register("closed", Arc::new(|m, _| closed_form_oracle(m)));
        oracles.register(
            "levy",
            Arc::new(|m, _| Ok(Box::new(LevyOracle::new(m)?) as Box<dyn Oracle>)),
        );
        oracles.register(
            "vasicek",
            Arc::new(|m, _| Ok(Box::new(VasicekOracle::new(m)?) as Box<dyn Oracle>)),
        );
        oracles.register(
            "cir",
            Arc::new(|m, _| Ok(Box::new(CirOracle::new(m)?) as Box<dyn Oracle>)),
        );
        oracles.register(
            "heston",
            Arc::new(|m, _| Ok(Box::new(HestonOracle::new(m)?) as Box<dyn Oracle>)),
        );
        oracles.register(
            "riccati",
            Arc::new(|m, c| Ok(Box::new(RiccatiOracle::new(m, c)) as Box<dyn Oracle>)),
        );

        let mut baselines: Registry<BaselineFactory> = Registry::new("baseline");
        baselines.register(
            "zero",
            Arc::new(|m: &AffineModel| {
                Ok(Arc::new(ZeroBaseline::new(m.dim())) as Arc<dyn Baseline>)
            }),
        );
        baselines.register(
            "vasicek",
            Arc::new(|m: &AffineModel| {
                Ok(Arc::new(VasicekBaseline::from_target(m)?) as Arc<dyn Baseline>)
            }),
        );
        baselines.register(
            "heston",
            Arc::new(|m: &AffineModel| {
                Ok(Arc::new(HestonBaseline::from_target(m)?) as Arc<dyn Baseline>)
            }),
        );

        Strategies {
            engines,
            oracles,
            baselines,
        }
    }

    /// Register a fixed baseline under its own name.
    pub fn register_baseline(&mut self, baseline: Arc<dyn Baseline>) {
        let name = baseline.name().to_string();
        self.baselines.register(
            name,
            Arc::new(move |m: &AffineModel| {
                if m.dim() != baseline.generator().dim() {
                    return Err(Error::NotApplicable {
                        kind: "baseline",
                        name: baseline.name().into(),
                        reason: format!(
                            "baseline has dimension {}, model {}",
                            baseline.generator().dim(),
                            m.dim()
                        ),
                    });
                }
                Ok(baseline.clone())
            }),
        );
    }

    pub fn engine(&self, name: &str, ctx: &EngineContext) -> Result<Box<dyn CfEngine>> {
        (self.engines.get(name)?)(ctx)
    }

    pub fn oracle(
        &self,
        name: &str,
        model: Arc<AffineModel>,
        config: IntegratorConfig,
    ) -> Result<Box<dyn Oracle>> {
        (self.oracles.get(name)?)(model, config)
    }

    pub fn baseline(&self, name: &str, target: &AffineModel) -> Result<Arc<dyn Baseline>> {
        (self.baselines.get(name)?)(target)
    }
}

impl Default for Strategies {
    fn default() -> Self {
        Self::builtin()
    }
}
