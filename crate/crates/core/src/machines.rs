//! Deterministic one-tape Turing machines over the alphabet `{0, 1, _}`,
//! a line-oriented text format for them, and step-bounded simulation.
//!
//! ```text
//! # comment
//! machine halt1
//! status halts 1
//! start q0
//! halt h
//! trans q0 _ -> h 1 R
//! trans q0 0 -> h 1 R
//! trans q0 1 -> h 1 R
//! end
//! ```
//!
//! A run starts on the all-blank bi-infinite tape with the head at cell 0.
//! Each transition is one step; entering the halt state ends the run and
//! counts as a step, so a machine whose start state is its halt state halts
//! after zero steps.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("machine {machine}: two transitions for ({state}, {symbol})")]
    Nondeterministic {
        machine: String,
        state: String,
        symbol: Symbol,
    },
    #[error("machine {machine}: state {state} is referenced but has no transitions and is not the halt state")]
    DanglingState { machine: String, state: String },
    #[error("machine {machine}: state {state} has no transition on {symbol}")]
    MissingTransition {
        machine: String,
        state: String,
        symbol: Symbol,
    },
    #[error("machine {machine}: halt state {state} must not have outgoing transitions")]
    TransitionFromHalt { machine: String, state: String },
    #[error("duplicate machine name {0}")]
    DuplicateName(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Symbol {
    Zero,
    One,
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    fn index(self) -> usize {
        match self {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Blank => 2,
        }
    }

    fn parse(token: &str) -> Option<Symbol> {
        match token {
            "0" => Some(Symbol::Zero),
            "1" => Some(Symbol::One),
            "_" => Some(Symbol::Blank),
            _ => None,
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Blank => '_',
        };
        write!(f, "{c}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Annotation carried by a machine definition. Only witness searches read
/// it; membership decisions never do.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeclaredStatus {
    HaltsIn(u64),
    Loops,
    #[default]
    Unknown,
}

impl fmt::Display for DeclaredStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeclaredStatus::HaltsIn(k) => write!(f, "halts {k}"),
            DeclaredStatus::Loops => write!(f, "loops"),
            DeclaredStatus::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Transition {
    next: usize,
    write: Symbol,
    move_to: Direction,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MachineSpec {
    name: String,
    states: Vec<String>,
    start: usize,
    halt: usize,
    // indexed by state, then symbol
    table: Vec<[Option<Transition>; 3]>,
    declared: DeclaredStatus,
}

impl MachineSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn declared_status(&self) -> DeclaredStatus {
        self.declared
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    /// Number of states other than the halt state.
    pub fn non_halt_states(&self) -> usize {
        self.states.len() - 1
    }

    pub fn start_state(&self) -> &str {
        &self.states[self.start]
    }

    pub fn halt_state(&self) -> &str {
        &self.states[self.halt]
    }

    pub fn run_bounded(&self, budget: u64) -> RunStatus {
        self.run_with_tape(budget).0
    }

    /// Runs like [`run_bounded`](Self::run_bounded) and also returns the final
    /// configuration.
    pub fn run_with_tape(&self, budget: u64) -> (RunStatus, Configuration) {
        let mut run = Run::new(self);
        let status = run.advance_to(budget);
        (status, run.config)
    }

    pub fn halts_within(&self, k: u64) -> bool {
        self.run_bounded(k).is_halted()
    }
}

/// A run that can be extended in slices: `advance_to(b)` continues from
/// where the previous call stopped.
#[derive(Debug, Clone)]
pub struct Run<'m> {
    machine: &'m MachineSpec,
    config: Configuration,
    steps: u64,
    halted: bool,
}

impl<'m> Run<'m> {
    pub fn new(machine: &'m MachineSpec) -> Self {
        Run {
            machine,
            config: Configuration::new(machine.start),
            steps: 0,
            halted: machine.start == machine.halt,
        }
    }

    /// Continues a run saved with [`into_parts`](Self::into_parts).
    pub fn resume(machine: &'m MachineSpec, config: Configuration, steps: u64) -> Self {
        let halted = config.state == machine.halt;
        Run {
            machine,
            config,
            steps,
            halted,
        }
    }

    pub fn into_parts(self) -> (Configuration, u64) {
        (self.config, self.steps)
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    /// Status after `budget` steps in total (not `budget` more).
    pub fn advance_to(&mut self, budget: u64) -> RunStatus {
        let m = self.machine;
        while !self.halted && self.steps < budget {
            let t = m.table[self.config.state][self.config.read().index()]
                .expect("validated machines are total on non-halt states");
            self.config.write(t.write);
            self.config.shift(t.move_to);
            self.config.state = t.next;
            self.steps += 1;
            self.halted = t.next == m.halt;
        }
        if self.halted && self.steps <= budget {
            RunStatus::Halted(self.steps)
        } else {
            RunStatus::RunningAfter(budget)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    /// The halt state was entered at the end of this step.
    Halted(u64),
    /// This many steps completed without halting.
    RunningAfter(u64),
}

impl RunStatus {
    pub fn is_halted(&self) -> bool {
        matches!(self, RunStatus::Halted(_))
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunStatus::Halted(k) => write!(f, "halted {k}"),
            RunStatus::RunningAfter(b) => write!(f, "running {b}"),
        }
    }
}

/// Tape contents, head position and current state. The tape grows on
/// demand in both directions; `origin` is the vector index of cell 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    tape: VecDeque<Symbol>,
    origin: usize,
    head: usize,
    state: usize,
}

impl Configuration {
    fn new(state: usize) -> Self {
        Configuration {
            tape: VecDeque::from([Symbol::Blank]),
            origin: 0,
            head: 0,
            state,
        }
    }

    fn read(&self) -> Symbol {
        self.tape[self.head]
    }

    fn write(&mut self, s: Symbol) {
        self.tape[self.head] = s;
    }

    fn shift(&mut self, d: Direction) {
        match d {
            Direction::Right => {
                self.head += 1;
                if self.head == self.tape.len() {
                    self.tape.push_back(Symbol::Blank);
                }
            }
            Direction::Left => {
                if self.head == 0 {
                    self.tape.push_front(Symbol::Blank);
                    self.origin += 1;
                } else {
                    self.head -= 1;
                }
            }
        }
    }

    /// Head position relative to the starting cell.
    pub fn head(&self) -> i64 {
        self.head as i64 - self.origin as i64
    }

    /// Non-blank cells as `(position, symbol)`, left to right.
    pub fn written_cells(&self) -> Vec<(i64, Symbol)> {
        self.tape
            .iter()
            .enumerate()
            .filter(|(_, s)| **s != Symbol::Blank)
            .map(|(i, s)| (i as i64 - self.origin as i64, *s))
            .collect()
    }
}

/// Parses every machine in `text`, in order.
pub fn parse_machines(text: &str) -> Result<Vec<MachineSpec>, MachineError> {
    let mut machines = Vec::new();
    let mut current: Option<Draft> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let syntax = |message: &str| MachineError::Syntax {
            line,
            message: message.to_string(),
        };
        match (tokens[0], current.as_mut()) {
            ("machine", None) => {
                let [_, name] = tokens[..] else {
                    return Err(syntax("expected `machine <name>`"));
                };
                current = Some(Draft::new(name, line));
            }
            ("machine", Some(_)) => return Err(syntax("`machine` before `end` of previous machine")),
            (_, None) => return Err(syntax("statement outside a `machine ... end` block")),
            ("status", Some(d)) => {
                if d.status.is_some() {
                    return Err(syntax("duplicate `status` line"));
                }
                d.status = Some(match tokens[1..] {
                    ["halts", k] => DeclaredStatus::HaltsIn(
                        k.parse().map_err(|_| syntax("step count must be a non-negative integer"))?,
                    ),
                    ["loops"] => DeclaredStatus::Loops,
                    ["unknown"] => DeclaredStatus::Unknown,
                    _ => return Err(syntax("expected `status halts <K>`, `status loops` or `status unknown`")),
                });
            }
            ("start", Some(d)) => {
                let [_, s] = tokens[..] else {
                    return Err(syntax("expected `start <state>`"));
                };
                if d.start.replace(s.to_string()).is_some() {
                    return Err(syntax("duplicate `start` line"));
                }
            }
            ("halt", Some(d)) => {
                let [_, s] = tokens[..] else {
                    return Err(syntax("expected `halt <state>`"));
                };
                if d.halt.replace(s.to_string()).is_some() {
                    return Err(syntax("duplicate `halt` line"));
                }
            }
            ("trans", Some(d)) => {
                let ["trans", from, read, "->", to, write, dir] = tokens[..] else {
                    return Err(syntax("expected `trans <state> <symbol> -> <state> <symbol> <L|R>`"));
                };
                let read = Symbol::parse(read).ok_or_else(|| syntax("symbols are 0, 1 and _"))?;
                let write = Symbol::parse(write).ok_or_else(|| syntax("symbols are 0, 1 and _"))?;
                let dir = match dir {
                    "L" => Direction::Left,
                    "R" => Direction::Right,
                    _ => return Err(syntax("direction must be L or R")),
                };
                d.transitions
                    .push((from.to_string(), read, to.to_string(), write, dir));
            }
            ("end", Some(_)) => {
                if tokens.len() != 1 {
                    return Err(syntax("unexpected tokens after `end`"));
                }
                let draft = current.take().expect("matched Some");
                machines.push(draft.finish()?);
            }
            (other, Some(_)) => return Err(syntax(&format!("unknown keyword `{other}`"))),
        }
    }
    if let Some(d) = current {
        return Err(MachineError::Syntax {
            line: d.opened_at,
            message: format!("machine {} has no `end`", d.name),
        });
    }
    Ok(machines)
}

/// Parses text that must contain exactly one machine.
pub fn parse_machine(text: &str) -> Result<MachineSpec, MachineError> {
    let mut all = parse_machines(text)?;
    match all.len() {
        1 => Ok(all.pop().expect("len 1")),
        n => Err(MachineError::Syntax {
            line: 1,
            message: format!("expected exactly one machine, found {n}"),
        }),
    }
}

type RawTransition = (String, Symbol, String, Symbol, Direction);

struct Draft {
    name: String,
    opened_at: usize,
    status: Option<DeclaredStatus>,
    start: Option<String>,
    halt: Option<String>,
    transitions: Vec<RawTransition>,
}

impl Draft {
    fn new(name: &str, opened_at: usize) -> Self {
        Draft {
            name: name.to_string(),
            opened_at,
            status: None,
            start: None,
            halt: None,
            transitions: Vec::new(),
        }
    }

    fn finish(self) -> Result<MachineSpec, MachineError> {
        let missing = |what: &str| MachineError::Syntax {
            line: self.opened_at,
            message: format!("machine {} has no `{what}` line", self.name),
        };
        let start = self.start.clone().ok_or_else(|| missing("start"))?;
        let halt = self.halt.clone().ok_or_else(|| missing("halt"))?;

        let mut states: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |s: &str| -> usize {
            if let Some(&i) = index.get(s) {
                return i;
            }
            states.push(s.to_string());
            index.insert(s.to_string(), states.len() - 1);
            states.len() - 1
        };
        let start_i = intern(&start);
        let halt_i = intern(&halt);
        let mut sources: HashSet<usize> = HashSet::new();
        let mut raw = Vec::with_capacity(self.transitions.len());
        for (from, read, to, write, dir) in &self.transitions {
            let f = intern(from);
            let t = intern(to);
            sources.insert(f);
            raw.push((f, *read, t, *write, *dir));
        }

        let mut table = vec![[None; 3]; states.len()];
        for (f, read, t, write, dir) in raw {
            if f == halt_i {
                return Err(MachineError::TransitionFromHalt {
                    machine: self.name,
                    state: halt,
                });
            }
            let slot = &mut table[f][read.index()];
            if slot.is_some() {
                return Err(MachineError::Nondeterministic {
                    machine: self.name,
                    state: states[f].clone(),
                    symbol: read,
                });
            }
            *slot = Some(Transition {
                next: t,
                write,
                move_to: dir,
            });
        }

        for (i, name) in states.iter().enumerate() {
            if i == halt_i {
                continue;
            }
            if !sources.contains(&i) && !(i == start_i && start_i == halt_i) {
                return Err(MachineError::DanglingState {
                    machine: self.name,
                    state: name.clone(),
                });
            }
            if let Some(symbol) = Symbol::ALL.into_iter().find(|s| table[i][s.index()].is_none()) {
                return Err(MachineError::MissingTransition {
                    machine: self.name,
                    state: name.clone(),
                    symbol,
                });
            }
        }

        Ok(MachineSpec {
            name: self.name,
            states,
            start: start_i,
            halt: halt_i,
            table,
            declared: self.status.unwrap_or_default(),
        })
    }
}

/// Ordered list of machines; position `n` (1-based) is machine `M_n`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    machines: Vec<MachineSpec>,
}

impl Registry {
    pub fn new(machines: Vec<MachineSpec>) -> Result<Self, MachineError> {
        let mut seen = HashSet::new();
        for m in &machines {
            if !seen.insert(m.name.clone()) {
                return Err(MachineError::DuplicateName(m.name.clone()));
            }
        }
        Ok(Registry { machines })
    }

    pub fn parse(text: &str) -> Result<Self, MachineError> {
        Registry::new(parse_machines(text)?)
    }

    /// Concatenates the machines of every file, in argument order.
    pub fn load<P: AsRef<Path>>(paths: &[P]) -> Result<Self, MachineError> {
        let mut machines = Vec::new();
        for p in paths {
            let p = p.as_ref();
            let text = std::fs::read_to_string(p).map_err(|source| MachineError::Io {
                path: p.display().to_string(),
                source,
            })?;
            machines.extend(parse_machines(&text)?);
        }
        Registry::new(machines)
    }

    pub fn len(&self) -> usize {
        self.machines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.machines.is_empty()
    }

    /// Machine `M_n`, 1-based.
    pub fn get(&self, n: usize) -> Option<&MachineSpec> {
        n.checked_sub(1).and_then(|i| self.machines.get(i))
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.machines.iter().position(|m| m.name == name).map(|i| i + 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = &MachineSpec> {
        self.machines.iter()
    }
}

/// Result of checking a declared status against simulation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    pub machine: String,
    pub declared: DeclaredStatus,
    pub observed: RunStatus,
    pub consistent: bool,
}

/// Simulates every machine up to `audit_budget` steps (or exactly `K` for
/// `halts K`, when larger) and compares with the declaration.
pub fn audit(registry: &Registry, audit_budget: u64) -> Vec<AuditReport> {
    registry
        .iter()
        .map(|m| {
            let budget = match m.declared {
                DeclaredStatus::HaltsIn(k) => k.max(audit_budget),
                _ => audit_budget,
            };
            let observed = m.run_bounded(budget);
            let consistent = match m.declared {
                DeclaredStatus::HaltsIn(k) => observed == RunStatus::Halted(k),
                DeclaredStatus::Loops => !observed.is_halted(),
                DeclaredStatus::Unknown => true,
            };
            AuditReport {
                machine: m.name.clone(),
                declared: m.declared,
                observed,
                consistent,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parses_fixtures() {
        let lp = parse_machine(fixtures::LOOP).unwrap();
        assert_eq!(lp.non_halt_states(), 1);
        assert_eq!(lp.declared_status(), DeclaredStatus::Unknown);
        let h1 = parse_machine(fixtures::HALT1).unwrap();
        assert_eq!(h1.declared_status(), DeclaredStatus::HaltsIn(1));
        assert_eq!(parse_machine(fixtures::LOOP_DECLARED).unwrap().declared_status(), DeclaredStatus::Loops);
    }

    #[test]
    fn rejects_nondeterminism() {
        let text = "machine bad\nstart q0\nhalt h\ntrans q0 _ -> h 1 R\ntrans q0 _ -> q0 0 L\ntrans q0 0 -> h 1 R\ntrans q0 1 -> h 1 R\nend\n";
        assert!(matches!(parse_machine(text), Err(MachineError::Nondeterministic { .. })));
    }

    #[test]
    fn rejects_dangling_and_partial() {
        let dangling = "machine d\nstart q0\nhalt h\ntrans q0 _ -> q1 1 R\ntrans q0 0 -> h 1 R\ntrans q0 1 -> h 1 R\nend\n";
        assert!(matches!(parse_machine(dangling), Err(MachineError::DanglingState { .. })));
        let partial = "machine p\nstart q0\nhalt h\ntrans q0 _ -> h 1 R\nend\n";
        assert!(matches!(parse_machine(partial), Err(MachineError::MissingTransition { .. })));
        let from_halt = "machine p\nstart h\nhalt h\ntrans h _ -> h 1 R\nend\n";
        assert!(matches!(parse_machine(from_halt), Err(MachineError::TransitionFromHalt { .. })));
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let text = "# header\nmachine m\nstart q0\nhalt h\ntrans q0 x -> h 1 R\nend\n";
        match parse_machine(text) {
            Err(MachineError::Syntax { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        match parse_machine("machine m\nstart q0\n") {
            Err(MachineError::Syntax { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_machine("start q0\n").is_err());
        assert!(parse_machine("machine m\nstatus sometimes\nend\n").is_err());
    }

    #[test]
    fn runs() {
        let lp = parse_machine(fixtures::LOOP).unwrap();
        assert_eq!(lp.run_bounded(1000), RunStatus::RunningAfter(1000));
        let h1 = parse_machine(fixtures::HALT1).unwrap();
        assert_eq!(h1.run_bounded(1000), RunStatus::Halted(1));
        let h14 = parse_machine(fixtures::HALT14).unwrap();
        assert_eq!(h14.run_bounded(13), RunStatus::RunningAfter(13));
        assert_eq!(h14.run_bounded(14), RunStatus::Halted(14));
    }

    #[test]
    fn halts_within_cases() {
        let h1 = parse_machine(fixtures::HALT1).unwrap();
        assert!(!h1.halts_within(0));
        assert!(h1.halts_within(5));
        let lp = parse_machine(fixtures::LOOP).unwrap();
        assert!(!lp.halts_within(1_000_000));
    }

    #[test]
    fn start_equal_to_halt_is_zero_steps() {
        let h0 = parse_machine(fixtures::HALT0).unwrap();
        assert_eq!(h0.run_bounded(0), RunStatus::Halted(0));
        assert_eq!(h0.run_bounded(10), RunStatus::Halted(0));
    }

    #[test]
    fn sliced_runs_match_single_runs() {
        let h14 = parse_machine(fixtures::HALT14).unwrap();
        let mut run = Run::new(&h14);
        for b in 0..20 {
            assert_eq!(run.advance_to(b), h14.run_bounded(b));
        }
        let mut run = Run::new(&h14);
        assert_eq!(run.advance_to(5), RunStatus::RunningAfter(5));
        assert_eq!(run.advance_to(3), RunStatus::RunningAfter(3));
        assert_eq!(run.steps(), 5);
        assert_eq!(run.advance_to(30), RunStatus::Halted(14));
        assert_eq!(run.advance_to(13), RunStatus::RunningAfter(13));
        let (config, steps) = run.into_parts();
        let mut resumed = Run::resume(&h14, config, steps);
        assert_eq!(resumed.advance_to(100), RunStatus::Halted(14));
    }

    #[test]
    fn halt14_tape() {
        let h14 = parse_machine(fixtures::HALT14).unwrap();
        let (status, config) = h14.run_with_tape(100);
        assert_eq!(status, RunStatus::Halted(14));
        assert_eq!(config.head(), -2);
        let cells = config.written_cells();
        assert_eq!(cells.len(), 7);
        assert!(cells.iter().all(|&(_, s)| s == Symbol::One));
        assert_eq!(cells.first().unwrap().0, 0);
    }

    #[test]
    fn registry_order_and_names() {
        let text = format!("{}\n{}", fixtures::LOOP, fixtures::HALT1);
        let reg = Registry::parse(&text).unwrap();
        assert_eq!(reg.len(), 2);
        assert_eq!(reg.get(1).unwrap().name(), "loop");
        assert_eq!(reg.get(2).unwrap().name(), "halt1");
        assert!(reg.get(0).is_none());
        assert_eq!(reg.position("halt1"), Some(2));
        let dup = format!("{}\n{}", fixtures::LOOP, fixtures::LOOP);
        assert!(matches!(Registry::parse(&dup), Err(MachineError::DuplicateName(_))));
    }

    #[test]
    fn audit_detects_lies() {
        let liar = fixtures::HALT1.replace("status halts 1", "status halts 3");
        let text = format!("{}\n{}\n{}", fixtures::LOOP_DECLARED, fixtures::HALT14, liar);
        let reports = audit(&Registry::parse(&text).unwrap(), 10_000);
        assert!(reports[0].consistent);
        assert!(reports[1].consistent);
        assert!(!reports[2].consistent);
    }
}
