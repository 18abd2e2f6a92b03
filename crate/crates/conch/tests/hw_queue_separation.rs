//! The queue with reserve-then-write enqueues and sweeping dequeues is
//! linearizable at small bounds, but admits no forward simulation into
//! the atomic queue: the enqueue order is committed only by later
//! dequeues.

use conch::error::Budget;
use conch::fsim::fsim_exists;
use conch::model::explore;
use conch::objects::atomic::AtomicModel;
use conch::objects::hw_queue::HwQueue;
use conch::objects::seqspec::QueueSpec;
use conch::refine::{refines_bounded, Refines};
use conch::Gamma;

#[test]
fn refines_but_no_forward_simulation() {
    let budget = Budget::default();
    let queue = HwQueue::new(4, 2, vec![1, 2]).with_ops(2, 2);
    let spec = QueueSpec { values: vec![1, 2] };
    let atomic = AtomicModel::new(spec, 4);

    assert!(matches!(
        refines_bounded(&queue, &atomic, &Gamma::CallReturn, 12, &budget).unwrap(),
        Refines::Holds
    ));

    let q_exp = explore(&queue, &budget).unwrap();
    let a_exp = explore(&atomic, &budget).unwrap();
    println!(
        "queue: {} states; atomic queue: {} states",
        q_exp.lts.num_states(),
        a_exp.lts.num_states()
    );
    assert!(
        fsim_exists(&q_exp.lts, &a_exp.lts, &Gamma::CallReturn, &budget)
            .unwrap()
            .is_none(),
        "enqueue commitment depends on the future; no forward simulation should exist"
    );
}

#[test]
fn single_op_queue_does_admit_a_simulation() {
    // With one enqueue and one dequeue there is nothing to commit early:
    // the fixpoint finds a simulation, separating this configuration from
    // the two-by-two one.
    let budget = Budget::default();
    let queue = HwQueue::new(2, 1, vec![1]).with_ops(1, 1);
    let atomic = AtomicModel::new(QueueSpec { values: vec![1] }, 2);
    let q_exp = explore(&queue, &budget).unwrap();
    let a_exp = explore(&atomic, &budget).unwrap();
    assert!(fsim_exists(&q_exp.lts, &a_exp.lts, &Gamma::CallReturn, &budget)
        .unwrap()
        .is_some());
}
