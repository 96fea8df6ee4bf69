import numpy as np

# stream purposes within one walk
STEPS = 0
START = 1
SHIFT = 2


def walk_stream(master_seed, walk_index, purpose=STEPS):
    """Counter-based generator owned by one walk; independent of scheduling."""
    seq = np.random.SeedSequence(int(master_seed), spawn_key=(int(walk_index), int(purpose)))
    return np.random.Generator(np.random.Philox(seq))


def walk_streams(master_seed, indices, purpose=STEPS):
    return [walk_stream(master_seed, i, purpose) for i in indices]
