//! Parsing of space-separated, period-terminated Prolog ground facts into
//! the five-predicate train DSL, and normalization into a train-agnostic
//! car model.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Attribute, AttrValue, CarLength, Color, WallType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Predicate {
    HasCar,
    CarNum,
    CarColor,
    CarLen,
    HasWall,
}

impl Predicate {
    pub fn name(&self) -> &'static str {
        match self {
            Predicate::HasCar => "has_car",
            Predicate::CarNum => "car_num",
            Predicate::CarColor => "car_color",
            Predicate::CarLen => "car_len",
            Predicate::HasWall => "has_wall",
        }
    }

    fn from_name(name: &str) -> Option<Predicate> {
        Some(match name {
            "has_car" => Predicate::HasCar,
            "car_num" => Predicate::CarNum,
            "car_color" => Predicate::CarColor,
            "car_len" => Predicate::CarLen,
            "has_wall" => Predicate::HasWall,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Ident(String),
    Int(u32),
}

impl Atom {
    fn render(&self) -> String {
        match self {
            Atom::Ident(s) => s.clone(),
            Atom::Int(n) => n.to_string(),
        }
    }
}

/// One ground fact `pred(arg1, arg2)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fact {
    pub predicate: Predicate,
    pub args: Vec<Atom>,
}

impl Fact {
    pub fn render(&self) -> String {
        let args: Vec<String> = self.args.iter().map(Atom::render).collect();
        format!("{}({}).", self.predicate.name(), args.join(", "))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SlrParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown predicate {name:?} at byte {offset}")]
    UnknownPredicate { name: String, offset: usize },
    #[error("predicate {predicate} expects 2 arguments, got {got} (at byte {offset})")]
    ArityMismatch { predicate: String, got: usize, offset: usize },
    #[error("value {value:?} outside the {predicate} domain (at byte {offset})")]
    DomainViolation { predicate: String, value: String, offset: usize },
}

struct Parser<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { text, bytes: text.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn syntax(&self, message: impl Into<String>) -> SlrParseError {
        SlrParseError::Syntax { offset: self.pos, message: message.into() }
    }

    fn expect(&mut self, ch: u8) -> Result<(), SlrParseError> {
        if self.pos < self.bytes.len() && self.bytes[self.pos] == ch {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected {:?}", ch as char)))
        }
    }

    fn ident(&mut self) -> Result<String, SlrParseError> {
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected identifier"));
        }
        Ok(self.text[start..self.pos].to_owned())
    }

    fn atom(&mut self) -> Result<Atom, SlrParseError> {
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            let start = self.pos;
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let n: u32 = self.text[start..self.pos]
                .parse()
                .map_err(|_| self.syntax("integer out of range"))?;
            Ok(Atom::Int(n))
        } else {
            Ok(Atom::Ident(self.ident()?))
        }
    }

    fn fact(&mut self) -> Result<Fact, SlrParseError> {
        let pred_offset = self.pos;
        let name = self.ident()?;
        let predicate = Predicate::from_name(&name)
            .ok_or(SlrParseError::UnknownPredicate { name: name.clone(), offset: pred_offset })?;
        self.skip_ws();
        self.expect(b'(')?;
        let mut args = vec![self.atom()?];
        loop {
            self.skip_ws();
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b',' {
                self.pos += 1;
                args.push(self.atom()?);
            } else {
                break;
            }
        }
        self.expect(b')')?;
        self.skip_ws();
        self.expect(b'.')?;
        if args.len() != 2 {
            return Err(SlrParseError::ArityMismatch {
                predicate: name,
                got: args.len(),
                offset: pred_offset,
            });
        }
        validate_domains(&predicate, &args, pred_offset)?;
        Ok(Fact { predicate, args })
    }
}

fn domain_violation(predicate: &Predicate, atom: &Atom, offset: usize) -> SlrParseError {
    SlrParseError::DomainViolation {
        predicate: predicate.name().to_owned(),
        value: atom.render(),
        offset,
    }
}

fn validate_domains(predicate: &Predicate, args: &[Atom], offset: usize) -> Result<(), SlrParseError> {
    let ident = |atom: &Atom| -> Result<String, SlrParseError> {
        match atom {
            Atom::Ident(s) => Ok(s.clone()),
            Atom::Int(_) => Err(domain_violation(predicate, atom, offset)),
        }
    };
    // first argument is always an entity identifier
    ident(&args[0])?;
    match predicate {
        Predicate::HasCar => {
            ident(&args[1])?;
        }
        Predicate::CarNum => match &args[1] {
            Atom::Int(n) if *n >= 1 => {}
            other => return Err(domain_violation(predicate, other, offset)),
        },
        Predicate::CarColor => {
            let value = ident(&args[1])?;
            if Color::from_atom(&value).is_none() {
                return Err(domain_violation(predicate, &args[1], offset));
            }
        }
        Predicate::CarLen => {
            let value = ident(&args[1])?;
            if CarLength::from_atom(&value).is_none() {
                return Err(domain_violation(predicate, &args[1], offset));
            }
        }
        Predicate::HasWall => {
            let value = ident(&args[1])?;
            if WallType::from_atom(&value).is_none() {
                return Err(domain_violation(predicate, &args[1], offset));
            }
        }
    }
    Ok(())
}

/// Parses whitespace-separated ground facts, validating predicate names,
/// arities, and value domains.
pub fn parse_facts(text: &str) -> Result<Vec<Fact>, SlrParseError> {
    let mut parser = Parser::new(text);
    let mut facts = Vec::new();
    loop {
        parser.skip_ws();
        if parser.pos >= parser.bytes.len() {
            break;
        }
        facts.push(parser.fact()?);
    }
    Ok(facts)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("car {0:?} has no car_num fact")]
    MissingCarNum(String),
    #[error("duplicate car_num for position {0}")]
    DuplicateCarNum(u32),
    #[error("car {0:?} declared more than one car_num")]
    ConflictingCarNum(String),
    #[error("property fact on undeclared car {0:?}")]
    OrphanProperty(String),
    #[error("car {car:?} has conflicting {attribute} values")]
    ConflictingProperty { car: String, attribute: String },
}

/// One normalized car: its position and the properties it carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarRecord {
    pub position: u32,
    pub color: Option<Color>,
    pub len: Option<CarLength>,
    pub wall: Option<WallType>,
}

impl CarRecord {
    pub fn value(&self, attr: Attribute) -> Option<AttrValue> {
        match attr {
            Attribute::Color => self.color.map(AttrValue::Color),
            Attribute::Len => self.len.map(AttrValue::Len),
            Attribute::Wall => self.wall.map(AttrValue::Wall),
            Attribute::Num => Some(AttrValue::Num(self.position)),
        }
    }
}

/// Train-agnostic car model: cars ordered by position, identifiers erased.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainModel {
    pub cars: Vec<CarRecord>,
}

#[derive(Default)]
struct PendingCar {
    num: Option<u32>,
    color: Option<Color>,
    len: Option<CarLength>,
    wall: Option<WallType>,
}

/// Normalizes parsed facts into a `TrainModel`, re-indexing cars by their
/// `car_num` and discarding train and car identifiers.
pub fn normalize(facts: &[Fact]) -> Result<TrainModel, NormalizeError> {
    let mut declared: BTreeMap<String, PendingCar> = BTreeMap::new();
    for fact in facts {
        if fact.predicate == Predicate::HasCar {
            if let Atom::Ident(car) = &fact.args[1] {
                declared.entry(car.clone()).or_default();
            }
        }
    }
    let car_name = |atom: &Atom| -> String {
        match atom {
            Atom::Ident(s) => s.clone(),
            Atom::Int(n) => n.to_string(),
        }
    };
    for fact in facts {
        if fact.predicate == Predicate::HasCar {
            continue;
        }
        let name = car_name(&fact.args[0]);
        let car = declared
            .get_mut(&name)
            .ok_or_else(|| NormalizeError::OrphanProperty(name.clone()))?;
        let conflict = |attribute: &str| NormalizeError::ConflictingProperty {
            car: name.clone(),
            attribute: attribute.to_owned(),
        };
        match (&fact.predicate, &fact.args[1]) {
            (Predicate::CarNum, Atom::Int(n)) => {
                if car.num.replace(*n).is_some_and(|old| old != *n) {
                    return Err(NormalizeError::ConflictingCarNum(name));
                }
            }
            (Predicate::CarColor, Atom::Ident(v)) => {
                let value = Color::from_atom(v).expect("validated at parse");
                if car.color.replace(value).is_some_and(|old| old != value) {
                    return Err(conflict("car_color"));
                }
            }
            (Predicate::CarLen, Atom::Ident(v)) => {
                let value = CarLength::from_atom(v).expect("validated at parse");
                if car.len.replace(value).is_some_and(|old| old != value) {
                    return Err(conflict("car_len"));
                }
            }
            (Predicate::HasWall, Atom::Ident(v)) => {
                let value = WallType::from_atom(v).expect("validated at parse");
                if car.wall.replace(value).is_some_and(|old| old != value) {
                    return Err(conflict("has_wall"));
                }
            }
            _ => unreachable!("argument shapes validated at parse"),
        }
    }

    let mut cars = Vec::with_capacity(declared.len());
    for (name, pending) in declared {
        let position = pending.num.ok_or(NormalizeError::MissingCarNum(name))?;
        cars.push(CarRecord {
            position,
            color: pending.color,
            len: pending.len,
            wall: pending.wall,
        });
    }
    cars.sort_by_key(|car| car.position);
    for pair in cars.windows(2) {
        if pair[0].position == pair[1].position {
            return Err(NormalizeError::DuplicateCarNum(pair[0].position));
        }
    }
    Ok(TrainModel { cars })
}

/// Renders a train model back into the fact grammar, naming the train `tid`
/// and cars `c1..cn` by position.
pub fn render_train_facts(train: &TrainModel, tid: &str) -> String {
    let mut facts = Vec::new();
    for car in &train.cars {
        let cid = format!("c{}", car.position);
        facts.push(format!("has_car({tid}, {cid})."));
        facts.push(format!("car_num({cid}, {}).", car.position));
        if let Some(color) = car.color {
            facts.push(format!("car_color({cid}, {}).", color.atom()));
        }
        if let Some(len) = car.len {
            facts.push(format!("car_len({cid}, {}).", len.atom()));
        }
        if let Some(wall) = car.wall {
            facts.push(format!("has_wall({cid}, {}).", wall.atom()));
        }
    }
    facts.join(" ")
}
