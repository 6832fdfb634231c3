//! Deterministic worker-thread fan-out for independent trials.

/// Environment variable selecting the worker-thread count.
pub const WORKERS_ENV: &str = "CSPGEO_WORKERS";

/// Map `job` over `0..trials` on worker threads and return the results
/// in trial order. Worker count comes from CSPGEO_WORKERS (default: the
/// machine's parallelism); workers share nothing mutable, so the result
/// is identical to the sequential run.
pub fn run_trials<R: Send>(trials: usize, job: impl Fn(usize) -> R + Sync) -> Vec<R> {
    let workers = std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1))
        .min(trials.max(1));
    if workers <= 1 {
        return (0..trials).map(job).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let (tx, rx) = std::sync::mpsc::channel::<(usize, R)>();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let next = &next;
            let job = &job;
            scope.spawn(move || loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= trials {
                    break;
                }
                let r = job(i);
                if tx.send((i, r)).is_err() {
                    break;
                }
            });
        }
        drop(tx);
    });
    let mut slots: Vec<Option<R>> = (0..trials).map(|_| None).collect();
    for (i, r) in rx {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|s| s.unwrap()).collect()
}
