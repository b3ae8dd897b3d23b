import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

BUNDLES = Path(__file__).parent / "data" / "bundles"
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture(scope="session")
def corpus_store(tmp_path_factory):
    from emoscope.ingest import CorpusStore

    root = tmp_path_factory.mktemp("store")
    store = CorpusStore(root)
    for bundle in sorted(BUNDLES.iterdir()):
        if bundle.is_dir():
            store.ingest(bundle)
    return store


@pytest.fixture(scope="session")
def client(corpus_store):
    from fastapi.testclient import TestClient

    from emoscope.service import create_app

    return TestClient(create_app(corpus_store))
