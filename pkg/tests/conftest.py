import pytest

from emorec import synth


@pytest.fixture(scope="session")
def tiny_corpus(tmp_path_factory):
    """24 short synthetic clips (3 per class), scannable as ravdess."""
    root = tmp_path_factory.mktemp("corpus")
    synth.generate_corpus(root, clips_per_class=3, seconds=1.0)
    return str(root)
