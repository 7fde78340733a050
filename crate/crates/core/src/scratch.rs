//! Per-thread dense accumulator for "weight into each neighboring label".

use std::cell::RefCell;

use crate::partition::CommunityId;

#[derive(Default)]
pub(crate) struct LabelWeights {
    weight: Vec<f64>,
    touched: Vec<CommunityId>,
}

impl LabelWeights {
    #[inline]
    pub(crate) fn add(&mut self, label: CommunityId, w: f64) {
        let slot = &mut self.weight[label as usize];
        if *slot == 0.0 {
            self.touched.push(label);
        }
        *slot += w;
    }

    #[inline]
    pub(crate) fn get(&self, label: CommunityId) -> f64 {
        self.weight[label as usize]
    }

    /// Labels seen since the last clear, in first-touch order.
    pub(crate) fn touched(&self) -> &[CommunityId] {
        &self.touched
    }

    fn clear(&mut self) {
        for &l in &self.touched {
            self.weight[l as usize] = 0.0;
        }
        self.touched.clear();
    }
}

thread_local! {
    static SCRATCH: RefCell<LabelWeights> = RefCell::new(LabelWeights::default());
}

/// Runs `f` with this thread's accumulator sized for labels in `0..bound`,
/// cleared on entry.
pub(crate) fn with_label_weights<R>(bound: usize, f: impl FnOnce(&mut LabelWeights) -> R) -> R {
    SCRATCH.with(|cell| {
        let mut scratch = cell.borrow_mut();
        if scratch.weight.len() < bound {
            scratch.weight.resize(bound, 0.0);
        }
        scratch.clear();
        f(&mut scratch)
    })
}
