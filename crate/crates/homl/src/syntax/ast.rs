//! Term trees for the world-lifted higher-order language, plus the theory
//! containers (definitions, axioms, claims) that the surface files parse into.

use std::fmt;

/// Simple types over two base types: entities and world-lifted propositions.
///
/// Two function types are important enough to deserve names: `Property`
/// (entity to proposition) and `PropSet` (property to proposition). They are
/// ordinary `Fun` values; the constructors below build them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SimpleType {
    Ent,
    Prop,
    Fun(Box<SimpleType>, Box<SimpleType>),
}

impl SimpleType {
    pub fn property() -> SimpleType {
        SimpleType::Fun(Box::new(SimpleType::Ent), Box::new(SimpleType::Prop))
    }

    pub fn prop_set() -> SimpleType {
        SimpleType::Fun(Box::new(SimpleType::property()), Box::new(SimpleType::Prop))
    }

    pub fn is_property(&self) -> bool {
        *self == SimpleType::property()
    }

    pub fn is_prop_set(&self) -> bool {
        *self == SimpleType::prop_set()
    }

    /// Quantifiers range over exactly four domains; anything else is a type error.
    pub fn is_quantifier_domain(&self) -> bool {
        matches!(self, SimpleType::Ent | SimpleType::Prop) || self.is_property() || self.is_prop_set()
    }

    pub fn fun(arg: SimpleType, res: SimpleType) -> SimpleType {
        SimpleType::Fun(Box::new(arg), Box::new(res))
    }
}

impl fmt::Display for SimpleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_property() {
            return write!(f, "Property");
        }
        if self.is_prop_set() {
            return write!(f, "PropSet");
        }
        match self {
            SimpleType::Ent => write!(f, "E"),
            SimpleType::Prop => write!(f, "Prop"),
            SimpleType::Fun(a, b) => write!(f, "({}>{})", a, b),
        }
    }
}

/// A formula (or term: the tree covers every simple type).
///
/// Possibilist quantifiers `Forall`/`Exists` carry their domain type; the
/// actualist pair `ForallE`/`ExistsE` binds entities only and consults the
/// model's existence table. `Global` is the validity wrapper: true iff the
/// body holds at every world. Equality is type-annotated by the typechecker
/// (`None` straight out of the parser).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(String, SimpleType),
    Var(String, SimpleType),
    Lam(String, SimpleType, Box<Formula>),
    App(Box<Formula>, Box<Formula>),
    Top,
    Bot,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Nec(Box<Formula>),
    Dia(Box<Formula>),
    /// Pointwise complement of a property.
    Compl(Box<Formula>),
    Eq(Option<SimpleType>, Box<Formula>, Box<Formula>),
    Neq(Option<SimpleType>, Box<Formula>, Box<Formula>),
    Forall(String, SimpleType, Box<Formula>),
    Exists(String, SimpleType, Box<Formula>),
    ForallE(String, Box<Formula>),
    ExistsE(String, Box<Formula>),
    Global(Box<Formula>),
}

impl Formula {
    pub fn app(f: Formula, a: Formula) -> Formula {
        Formula::App(Box::new(f), Box::new(a))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn global(f: Formula) -> Formula {
        Formula::Global(Box::new(f))
    }

    /// Wrap in the global-validity marker unless already wrapped.
    pub fn ensure_global(self) -> Formula {
        match self {
            g @ Formula::Global(_) => g,
            other => Formula::global(other),
        }
    }

    /// Body of the global wrapper, or the formula itself.
    pub fn peel_global(&self) -> &Formula {
        match self {
            Formula::Global(b) => b,
            other => other,
        }
    }
}

/// Accessibility-relation constraint a theory (or single claim) runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Frame {
    /// No constraint.
    K,
    /// Reflexive accessibility.
    T,
    /// Symmetric accessibility.
    Kb,
}

impl Frame {
    pub fn tag(self) -> &'static str {
        match self {
            Frame::K => "k",
            Frame::T => "t",
            Frame::Kb => "kb",
        }
    }

    pub fn from_tag(s: &str) -> Option<Frame> {
        match s {
            "k" => Some(Frame::K),
            "t" => Some(Frame::T),
            "kb" => Some(Frame::Kb),
            _ => None,
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// A named, parameterized abbreviation. Bodies may reference only earlier
/// definitions, so expansion always terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct Definition {
    pub name: String,
    pub params: Vec<(String, SimpleType)>,
    pub body: Formula,
    /// Result type of the fully applied definition (the body's type).
    pub result: SimpleType,
}

impl Definition {
    /// Type of the definition constant itself: params curried onto the result.
    pub fn signature(&self) -> SimpleType {
        self.params
            .iter()
            .rev()
            .fold(self.result.clone(), |acc, (_, t)| SimpleType::fun(t.clone(), acc))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClaimKind {
    Valid,
    Countersat,
    Consistent,
    /// Validity claim carrying named premises (a proof-net edge).
    Edge,
}

impl fmt::Display for ClaimKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClaimKind::Valid => "valid",
            ClaimKind::Countersat => "countersat",
            ClaimKind::Consistent => "consistent",
            ClaimKind::Edge => "valid-from",
        };
        f.write_str(s)
    }
}

/// One expected result, checked at every listed `(worlds, entities)` bound.
///
/// `Valid` and `Edge` claims demand exhaustive absence of countermodels at
/// each bound; `Countersat` demands a witness at some bound; `Consistent`
/// demands a model of the axioms alone and carries no conjecture.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub name: String,
    pub kind: ClaimKind,
    /// Axiom or earlier-claim names; nonempty exactly for `Edge`.
    pub premises: Vec<String>,
    pub conjecture: Option<Formula>,
    pub bounds: Vec<(u32, u32)>,
    pub frame_override: Option<Frame>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theory {
    pub name: String,
    pub frame: Frame,
    pub defs: Vec<Definition>,
    /// How many leading `defs` were ambient seeds rather than source lines;
    /// printing skips them so output mirrors what was written.
    pub seeded: usize,
    pub axioms: Vec<(String, Formula)>,
    pub claims: Vec<Claim>,
}

impl Theory {
    pub fn axiom(&self, name: &str) -> Option<&Formula> {
        self.axioms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn def(&self, name: &str) -> Option<&Definition> {
        self.defs.iter().find(|d| d.name == name)
    }

    /// Effective frame for a claim, honoring a per-claim override.
    pub fn frame_for(&self, claim: &Claim) -> Frame {
        claim.frame_override.unwrap_or(self.frame)
    }
}

/// The one built-in constant: the positive-property predicate, of type
/// property-to-proposition-set member, i.e. `PropSet`.
pub const POSITIVE: &str = "P";

pub fn positive_const() -> Formula {
    Formula::Const(POSITIVE.to_string(), SimpleType::prop_set())
}
