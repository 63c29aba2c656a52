use serde::{Deserialize, Serialize};

use super::state::{Cursor, Rejection, TaggedEvent, TaggerState};
use crate::simulator::{Edge, EventRecord, EventStream};
use crate::{Error, Execution, Result};

/// Outcome counts of one [`process_stream`] run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagStats {
    pub events: u64,
    pub tagged: u64,
    pub off_polarity: u64,
    pub idle: u64,
    pub id_pattern: u64,
    pub out_of_bounds: u64,
    pub invalid_disparity: u64,
    pub depth_out_of_range: u64,
    /// Trigger pairs that forced the state machine to IDLE.
    pub desyncs: u64,
}

impl TagStats {
    pub fn rejected(&self) -> u64 {
        self.events - self.tagged
    }

    fn count(&mut self, r: Rejection) {
        *match r {
            Rejection::OffPolarity => &mut self.off_polarity,
            Rejection::Idle => &mut self.idle,
            Rejection::IdPattern => &mut self.id_pattern,
            Rejection::OutOfBounds => &mut self.out_of_bounds,
            Rejection::InvalidDisparity => &mut self.invalid_disparity,
            Rejection::DepthOutOfRange => &mut self.depth_out_of_range,
        } += 1;
    }

    pub fn merge(&mut self, o: &TagStats) {
        self.events += o.events;
        self.tagged += o.tagged;
        self.off_polarity += o.off_polarity;
        self.idle += o.idle;
        self.id_pattern += o.id_pattern;
        self.out_of_bounds += o.out_of_bounds;
        self.invalid_disparity += o.invalid_disparity;
        self.depth_out_of_range += o.depth_out_of_range;
        self.desyncs += o.desyncs;
    }
}

fn check_order(events: &[EventRecord], stream: &EventStream) -> Result<()> {
    for (i, w) in events.windows(2).enumerate() {
        if w[1].t < w[0].t {
            return Err(Error::UnorderedStream {
                index: i + 1,
                t: w[1].t,
                prev: w[0].t,
            });
        }
    }
    for (i, w) in stream.triggers.windows(2).enumerate() {
        if w[1].t < w[0].t {
            return Err(Error::MalformedTriggers {
                index: i + 1,
                reason: format!("t = {} after {}", w[1].t, w[0].t),
            });
        }
    }
    for (i, t) in stream.triggers.iter().enumerate() {
        let expected = if i % 2 == 0 {
            Edge::Rising
        } else {
            Edge::Falling
        };
        if t.edge != expected {
            return Err(Error::MalformedTriggers {
                index: i,
                reason: format!("expected {expected:?} edge"),
            });
        }
    }
    if stream.triggers.len() % 2 == 1 {
        return Err(Error::MalformedTriggers {
            index: stream.triggers.len() - 1,
            reason: "rising edge without falling edge".into(),
        });
    }
    Ok(())
}

/// [`process_stream_with`] using the default execution.
pub fn process_stream(
    state: &mut TaggerState<'_>,
    stream: &EventStream,
) -> Result<(Vec<TaggedEvent>, TagStats)> {
    process_stream_with(state, stream, Execution::default())
}

/// Event ranges sharing one cursor, plus the number of desyncs.
type Plan = (Vec<(usize, usize, Cursor)>, u64);

/// Splits the events into runs tagged under one cursor each and leaves the
/// final cursor in `state`.
fn plan(state: &mut TaggerState<'_>, stream: &EventStream) -> Result<Plan> {
    let events = &stream.events;
    check_order(events, stream)?;

    let mut desyncs = 0;
    // (start time, cursor) per window; the first window is open to the left.
    let mut windows = vec![(0u64, state.cursor)];
    let mut cur = state.cursor;
    for pair in stream.triggers.chunks_exact(2) {
        cur = match state.next_cursor(cur, pair[1].t - pair[0].t) {
            Ok(c) => c,
            Err(_) => {
                desyncs += 1;
                Cursor::IDLE
            }
        };
        windows.push((pair[0].t, cur));
    }
    state.cursor = cur;

    let comp = state.config.latency_compensation_us;
    let lookup = |e: &EventRecord| e.t.saturating_sub(comp);
    let mut ranges = Vec::with_capacity(windows.len());
    let mut begin = 0;
    for (i, &(_, cursor)) in windows.iter().enumerate() {
        let end = match windows.get(i + 1) {
            Some(&(next, _)) => begin + events[begin..].partition_point(|e| lookup(e) < next),
            None => events.len(),
        };
        if end > begin {
            ranges.push((begin, end, cursor));
        }
        begin = end;
    }
    Ok((ranges, desyncs))
}

/// Tags every event of `stream` in input order.
///
/// Each trigger pair takes effect at its rising edge (its exposure is read
/// from the falling edge). An event is tagged under the cursor in force at
/// `t - latency_compensation`. The cursor is constant between rising edges,
/// so windows are tagged independently and in parallel when `exec` asks
/// for it. On return `state` holds the cursor after the last trigger.
pub fn process_stream_with(
    state: &mut TaggerState<'_>,
    stream: &EventStream,
    exec: Execution,
) -> Result<(Vec<TaggedEvent>, TagStats)> {
    let (ranges, desyncs) = plan(state, stream)?;
    let events = &stream.events;
    let st: &TaggerState<'_> = state;
    let parts = exec.map(&ranges, |&(b, e, cursor)| {
        let mut local = TagStats::default();
        let mut out = Vec::with_capacity(e - b);
        for ev in &events[b..e] {
            match st.tag_with(&cursor, ev) {
                Ok(t) => out.push(t),
                Err(r) => local.count(r),
            }
        }
        local.events = (e - b) as u64;
        local.tagged = out.len() as u64;
        (out, local)
    });
    let mut stats = TagStats {
        desyncs,
        ..TagStats::default()
    };
    let mut tagged = Vec::with_capacity(parts.iter().map(|p| p.0.len()).sum());
    for (out, local) in parts {
        tagged.extend(out);
        stats.merge(&local);
    }
    Ok((tagged, stats))
}

/// Like [`process_stream_with`] but keeps one outcome per input event,
/// index-aligned with `stream.events`.
pub fn tag_outcomes_with(
    state: &mut TaggerState<'_>,
    stream: &EventStream,
    exec: Execution,
) -> Result<Vec<std::result::Result<TaggedEvent, Rejection>>> {
    let (ranges, _) = plan(state, stream)?;
    let events = &stream.events;
    let st: &TaggerState<'_> = state;
    let parts = exec.map(&ranges, |&(b, e, cursor)| {
        events[b..e]
            .iter()
            .map(|ev| st.tag_with(&cursor, ev))
            .collect::<Vec<_>>()
    });
    Ok(parts.concat())
}
