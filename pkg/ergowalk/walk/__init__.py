from ergowalk.walk.export import read_steps, summary_header, summary_rows, write_steps
from ergowalk.walk.recurrence import RecurrenceReport, recurrence_stats
from ergowalk.walk.rng import SHIFT, START, STEPS, walk_stream, walk_streams
from ergowalk.walk.simulate import (
    WalkEnsemble,
    WalkSample,
    default_threads,
    run_walks,
    simulate_ensemble,
    simulate_quenched,
    step_kernel,
)
