"""Regression against the shipped manifest of verdict bundles."""

import pytest

from conftest import fixture, fixture_names, manifest
from dimer.cli import stable_bundle, verdict_bundle
from dimer.generators import default_corpus


@pytest.mark.parametrize("name", fixture_names())
def test_bundle_matches_manifest(name):
    meta = manifest()
    entry = dict(meta["models"][name])
    entry.pop("file")
    entry.pop("oracle_matching_count", None)
    bundle = verdict_bundle(fixture(name), length=meta["length"], cap=meta["matching_cap"])
    assert stable_bundle(bundle) == entry
    assert bundle["verdicts"] != "BUG"


def test_corpus_is_shipped():
    names = set(fixture_names())
    corpus = default_corpus()
    assert len(corpus) >= 50
    assert {spec.build().name for spec in corpus} <= names
