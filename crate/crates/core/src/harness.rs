//! Deterministic stateful harness runtime.
//!
//! A harness program owns an internal state, issues bounded model calls, and
//! deterministically transitions on each sampled response. All randomness
//! lives in the model calls, whose seeds derive from the run seed and call
//! index; the transition, readout and terminal-context functions are pure.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::context::ContextParts;
use crate::error::{Error, Result};
use crate::membank::MemoryBank;
use crate::policy::PolicyParams;
use crate::seeds::{fnv1a64, split_seed};
use crate::vocab::Token;

/// Training-only oracle information injected into a harness's initial state.
pub enum PrivilegedInput<'a> {
    Empty,
    /// Verified reference solution.
    Solution(&'a [Token]),
    /// Memory-bank snapshot: only entries with arrival index below the bound
    /// are visible.
    Bank {
        bank: &'a MemoryBank,
        visible_before: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallRequest {
    pub prompt: Vec<Token>,
    pub max_len: usize,
    pub temperature: f64,
}

pub enum HarnessStep {
    Call(CallRequest),
    Halt,
}

pub trait HarnessProgram {
    type State;

    fn name(&self) -> &'static str;

    /// Upper bound on model calls per execution.
    fn max_calls(&self) -> usize;

    fn init(&self, x: &[Token], z: &PrivilegedInput) -> Result<Self::State>;

    fn next_call(&self, state: &Self::State) -> Result<HarnessStep>;

    fn transition(&self, state: Self::State, response: &[Token]) -> Result<Self::State>;

    /// Final answer read out of a terminal state.
    fn readout(&self, state: &Self::State) -> Vec<Token>;

    /// Structured context the execution leaves behind for the teacher.
    fn context_of(&self, state: &Self::State) -> ContextParts;

    /// Canonical byte encoding of a state, used for replay digests.
    fn encode_state(&self, state: &Self::State) -> Vec<u8>;
}

#[derive(Debug, Clone)]
pub struct CallRecord {
    pub prompt: Vec<Token>,
    pub response: Vec<Token>,
    pub step_dists: Vec<Vec<f64>>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct HarnessTrace {
    pub call_records: Vec<CallRecord>,
    /// Digest of the state after init and after every transition.
    pub state_digests: Vec<u64>,
    pub terminal_context: ContextParts,
    pub final_answer: Vec<Token>,
}

pub fn state_digest(bytes: &[u8]) -> u64 {
    fnv1a64(bytes)
}

fn check_request(driver: &PolicyParams, req: &CallRequest) -> Result<()> {
    if req.max_len == 0 {
        return Err(Error::Program("call request with max_len 0".into()));
    }
    if req.temperature < 0.0 {
        return Err(Error::Program("call request with negative temperature".into()));
    }
    driver.dims().vocab.check_seq(&req.prompt).map_err(|e| match e {
        Error::InvalidToken { token, vocab_size } => Error::Program(format!(
            "call prompt contains invalid token {token} (vocab {vocab_size})"
        )),
        other => other,
    })
}

/// Execute a harness program against a policy snapshot. Identical inputs and
/// seed produce identical traces.
pub fn run_harness<P: HarnessProgram>(
    program: &P,
    driver: &PolicyParams,
    x: &[Token],
    z: &PrivilegedInput,
    seed: u64,
) -> Result<(Vec<Token>, HarnessTrace)> {
    let budget = program.max_calls();
    let mut state = program.init(x, z)?;
    let mut digests = vec![state_digest(&program.encode_state(&state))];
    let mut calls: Vec<CallRecord> = Vec::new();

    loop {
        match program.next_call(&state)? {
            HarnessStep::Halt => break,
            HarnessStep::Call(req) => {
                if calls.len() == budget {
                    return Err(Error::BudgetExceeded { budget });
                }
                check_request(driver, &req)?;
                let call_seed = split_seed(seed, calls.len() as u64);
                let rollout =
                    driver.sample_sequence(&req.prompt, req.max_len, req.temperature, call_seed)?;
                state = program.transition(state, &rollout.generated)?;
                digests.push(state_digest(&program.encode_state(&state)));
                calls.push(CallRecord {
                    prompt: req.prompt,
                    response: rollout.generated,
                    step_dists: rollout.step_dists,
                    seed: call_seed,
                });
            }
        }
    }

    let answer = program.readout(&state);
    let trace = HarnessTrace {
        call_records: calls,
        state_digests: digests,
        terminal_context: program.context_of(&state),
        final_answer: answer.clone(),
    };
    Ok((answer, trace))
}

/// Re-run the deterministic half of an execution using the recorded call
/// responses, checking each state digest. Isolates all stochasticity to the
/// model calls.
pub fn replay_trace<P: HarnessProgram>(
    program: &P,
    x: &[Token],
    z: &PrivilegedInput,
    trace: &HarnessTrace,
) -> Result<()> {
    let mut state = program.init(x, z)?;
    let check = |digests: &[u64], idx: usize, state: &P::State| -> Result<()> {
        let got = state_digest(&program.encode_state(state));
        if digests.get(idx) != Some(&got) {
            return Err(Error::Program(format!(
                "replay digest mismatch at state {idx}"
            )));
        }
        Ok(())
    };
    check(&trace.state_digests, 0, &state)?;
    for (i, call) in trace.call_records.iter().enumerate() {
        state = program.transition(state, &call.response)?;
        check(&trace.state_digests, i + 1, &state)?;
    }
    if program.readout(&state) != trace.final_answer {
        return Err(Error::Program("replay readout mismatch".into()));
    }
    if program.context_of(&state) != trace.terminal_context {
        return Err(Error::Program("replay terminal context mismatch".into()));
    }
    Ok(())
}

/// One line of the execution log.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceRecord {
    pub instance_id: String,
    pub seed: u64,
    pub call_count: usize,
    pub state_digests: Vec<u64>,
    pub terminal_context_tokens: Vec<Token>,
    pub final_answer: Vec<Token>,
}

impl TraceRecord {
    pub fn from_trace(
        instance_id: &str,
        seed: u64,
        trace: &HarnessTrace,
        vocab: &crate::vocab::Vocab,
    ) -> Result<Self> {
        Ok(TraceRecord {
            instance_id: instance_id.to_string(),
            seed,
            call_count: trace.call_records.len(),
            state_digests: trace.state_digests.clone(),
            terminal_context_tokens: crate::context::serialize_context(
                vocab,
                &trace.terminal_context,
            )?,
            final_answer: trace.final_answer.clone(),
        })
    }
}

pub fn write_trace_log<W: Write>(mut w: W, records: &[TraceRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trace_log<R: BufRead>(r: R) -> Result<Vec<TraceRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        out.push(serde_json::from_str(&line?)?);
    }
    Ok(out)
}
