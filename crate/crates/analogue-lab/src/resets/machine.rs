//! Two-register machines, their line-based assembly format, and a
//! deterministic dovetailer enumerating the halting members of a program
//! family.
//!
//! The instruction set is Minsky-style: `INC r` increments a register,
//! `DJZ r t` jumps to `t` when register `r` is zero and decrements it
//! otherwise, `HALT` stops. Jump targets are instruction indices; the index
//! one past the last instruction is the explicit end label (spelled `end` in
//! assembly) and behaves like `HALT`.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("instruction {index}: jump target {target} is out of range (end label is {end})")]
    BadTarget { index: usize, target: usize, end: usize },
    #[error("instruction {index}: register {register} is out of range (machine has {count})")]
    BadRegister { index: usize, register: usize, count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instruction {
    /// Increment register `r`.
    Inc(usize),
    /// Decrement register `r` and fall through, or jump to the target label
    /// when the register is zero.
    DecOrJump(usize, usize),
    Halt,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisterMachine {
    instructions: Vec<Instruction>,
    register_count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunOutcome {
    Halted { steps: u64, registers: Vec<u64> },
    OutOfBudget,
}

impl RunOutcome {
    pub fn halted(&self) -> bool {
        matches!(self, RunOutcome::Halted { .. })
    }
}

impl RegisterMachine {
    pub fn new(instructions: Vec<Instruction>, register_count: usize) -> Result<Self, MachineError> {
        let end = instructions.len();
        for (index, ins) in instructions.iter().enumerate() {
            let register = match *ins {
                Instruction::Inc(r) => Some(r),
                Instruction::DecOrJump(r, target) => {
                    if target > end {
                        return Err(MachineError::BadTarget { index, target, end });
                    }
                    Some(r)
                }
                Instruction::Halt => None,
            };
            if let Some(register) = register {
                if register >= register_count {
                    return Err(MachineError::BadRegister {
                        index,
                        register,
                        count: register_count,
                    });
                }
            }
        }
        Ok(RegisterMachine {
            instructions,
            register_count,
        })
    }

    /// Parse the line-based assembly format. One instruction per line;
    /// `#` starts a comment; registers and labels are decimal, `end` names
    /// the index one past the last instruction. The register count is
    /// inferred from the highest register mentioned.
    pub fn parse_asm(text: &str) -> Result<Self, MachineError> {
        let mut raw: Vec<(usize, Vec<String>)> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tokens: Vec<String> = body.split_whitespace().map(str::to_string).collect();
            raw.push((lineno + 1, tokens));
        }
        let end = raw.len();
        let mut instructions = Vec::with_capacity(end);
        let mut max_register = None::<usize>;
        for (line, tokens) in &raw {
            let err = |message: String| MachineError::Parse {
                line: *line,
                message,
            };
            let op = tokens[0].to_ascii_uppercase();
            let ins = match op.as_str() {
                "INC" => {
                    if tokens.len() != 2 {
                        return Err(err("INC takes one register".into()));
                    }
                    let r = parse_nat(&tokens[1]).ok_or_else(|| err(format!("bad register `{}`", tokens[1])))?;
                    max_register = Some(max_register.map_or(r, |m: usize| m.max(r)));
                    Instruction::Inc(r)
                }
                "DJZ" => {
                    if tokens.len() != 3 {
                        return Err(err("DJZ takes a register and a label".into()));
                    }
                    let r = parse_nat(&tokens[1]).ok_or_else(|| err(format!("bad register `{}`", tokens[1])))?;
                    let target = if tokens[2].eq_ignore_ascii_case("end") {
                        end
                    } else {
                        parse_nat(&tokens[2]).ok_or_else(|| err(format!("bad label `{}`", tokens[2])))?
                    };
                    max_register = Some(max_register.map_or(r, |m: usize| m.max(r)));
                    Instruction::DecOrJump(r, target)
                }
                "HALT" => {
                    if tokens.len() != 1 {
                        return Err(err("HALT takes no operands".into()));
                    }
                    Instruction::Halt
                }
                other => return Err(err(format!("unknown instruction `{other}`"))),
            };
            instructions.push(ins);
        }
        let register_count = max_register.map_or(0, |m| m + 1);
        RegisterMachine::new(instructions, register_count)
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn register_count(&self) -> usize {
        self.register_count
    }

    /// Execute from zeroed registers for at most `max_steps` instruction
    /// executions. Reaching `HALT` or the end label halts; the `HALT`
    /// execution itself counts as a step.
    pub fn run(&self, max_steps: u64) -> RunOutcome {
        let mut registers = vec![0u64; self.register_count];
        let mut pc = 0usize;
        let mut steps = 0u64;
        loop {
            if pc >= self.instructions.len() {
                return RunOutcome::Halted { steps, registers };
            }
            if steps == max_steps {
                return RunOutcome::OutOfBudget;
            }
            steps += 1;
            match self.instructions[pc] {
                Instruction::Inc(r) => {
                    registers[r] += 1;
                    pc += 1;
                }
                Instruction::DecOrJump(r, target) => {
                    if registers[r] == 0 {
                        pc = target;
                    } else {
                        registers[r] -= 1;
                        pc += 1;
                    }
                }
                Instruction::Halt => {
                    return RunOutcome::Halted { steps, registers };
                }
            }
        }
    }
}

fn parse_nat(token: &str) -> Option<usize> {
    token.parse::<usize>().ok()
}

/// How a halting program classified its input, read off the registers at the
/// halt. Used to split the halting set into a disjoint r.e. pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltClass {
    /// Halted with register 0 cleared.
    Accepting,
    /// Halted with a nonzero register 0.
    Rejecting,
}

/// A fixed, ordered family of two-register programs together with a stage
/// cap for the dovetailer. The family index doubles as the natural number
/// whose membership (in the halting set) the experiments ask about.
#[derive(Debug, Clone)]
pub struct MachineFamily {
    programs: Vec<RegisterMachine>,
    stage_cap: u64,
}

/// One dovetail discovery: program `index` was first seen halting at stage
/// `stage`, in `steps` machine steps, with the given classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Discovery {
    pub index: u64,
    pub stage: u64,
    pub steps: u64,
    pub class: HaltClass,
}

impl MachineFamily {
    pub fn new(programs: Vec<RegisterMachine>, stage_cap: u64) -> Self {
        MachineFamily { programs, stage_cap }
    }

    /// Built-in demo family: index `i` gets `m = (i*i + 3i) mod 17 + 1`
    /// increments, then by residue of `i` mod 3 either halts immediately,
    /// spins forever on a self-jump, or counts register 0 back down to zero
    /// before halting. Two thirds of the indices halt, at well spread times,
    /// and both halt classes occur.
    pub fn demo(count: usize) -> Self {
        let programs = (0..count)
            .map(|i| {
                let m = (i * i + 3 * i) % 17 + 1;
                let mut ins: Vec<Instruction> = (0..m).map(|_| Instruction::Inc(0)).collect();
                match i % 3 {
                    0 => ins.push(Instruction::Halt),
                    1 => {
                        // r1 stays zero, so this jump never falls through.
                        ins.push(Instruction::DecOrJump(1, m));
                    }
                    _ => {
                        // Count r0 back down: DJZ falls through while r0 > 0,
                        // the unconditional jump on r1 loops back.
                        ins.push(Instruction::DecOrJump(0, m + 2));
                        ins.push(Instruction::DecOrJump(1, m));
                        ins.push(Instruction::Halt);
                    }
                }
                RegisterMachine::new(ins, 2).expect("demo programs are well formed")
            })
            .collect();
        MachineFamily::new(programs, 4096)
    }

    pub fn len(&self) -> usize {
        self.programs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.programs.is_empty()
    }

    pub fn stage_cap(&self) -> u64 {
        self.stage_cap
    }

    pub fn program(&self, index: usize) -> Option<&RegisterMachine> {
        self.programs.get(index)
    }

    /// Dovetail discoveries in emission order. Stage `s` runs programs
    /// `0..s` for `s` steps each; a program is discovered at the first stage
    /// whose budget covers its halting time, ties broken by program index.
    /// Equivalently: program `i` halting in `t` steps is discovered at stage
    /// `max(i + 1, t)`, and discoveries sort by `(stage, index)`.
    pub fn discoveries(&self) -> Vec<Discovery> {
        let mut found: Vec<Discovery> = self
            .programs
            .iter()
            .enumerate()
            .filter_map(|(i, p)| match p.run(self.stage_cap) {
                RunOutcome::Halted { steps, registers } => {
                    let stage = steps.max(i as u64 + 1);
                    if stage > self.stage_cap {
                        return None;
                    }
                    let class = if registers.first().copied().unwrap_or(0) == 0 {
                        HaltClass::Accepting
                    } else {
                        HaltClass::Rejecting
                    };
                    Some(Discovery {
                        index: i as u64,
                        stage,
                        steps,
                        class,
                    })
                }
                RunOutcome::OutOfBudget => None,
            })
            .collect();
        found.sort_by_key(|d| (d.stage, d.index));
        found
    }
}
