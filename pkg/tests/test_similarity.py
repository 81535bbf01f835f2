import json

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cgworkbench.errors import CGError, EmbeddingServiceError
from cgworkbench.similarity import (
    LexicalSimilarity,
    PrecomputedVectors,
    RemoteEmbeddings,
    cosine01,
    lexical_similarity,
)


class TestCosine01:
    def test_identity(self):
        assert cosine01((1, 2, 3), (1, 2, 3)) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine01((1, 0), (0, 1)) == 0.0

    def test_opposite_clamped(self):
        assert cosine01((1, 0), (-1, 0)) == 0.0

    def test_rescale_mode(self):
        assert cosine01((1, 0), (-1, 0), mode="rescale") == pytest.approx(0.0)
        assert cosine01((1, 0), (0, 1), mode="rescale") == pytest.approx(0.5)

    def test_dimension_mismatch(self):
        with pytest.raises(CGError, match="dimension mismatch"):
            cosine01((1, 2), (1, 2, 3))

    def test_zero_vector(self):
        with pytest.raises(CGError, match="zero vector"):
            cosine01((0, 0), (1, 2))

    def test_non_finite_rejected(self):
        with pytest.raises(CGError, match="non-finite"):
            cosine01((float("nan"), 1.0), (1.0, 1.0))

    @given(
        u=st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=3, max_size=3),
        v=st.lists(st.floats(-10, 10, allow_subnormal=False), min_size=3, max_size=3),
    )
    @settings(max_examples=200)
    def test_codomain_and_symmetry(self, u, v):
        if max(map(abs, u)) < 1e-6 or max(map(abs, v)) < 1e-6:
            return
        s = cosine01(u, v)
        assert 0.0 <= s <= 1.0
        assert s == pytest.approx(cosine01(v, u))


class TestLexical:
    def test_identity(self):
        assert lexical_similarity("B sleeps", "B sleeps") == 1.0

    def test_disjoint(self):
        assert lexical_similarity("a b", "c d") == 0.0

    def test_jaccard(self):
        # |intersection| = 2, |union| = 4
        assert lexical_similarity("a b c", "b c d") == 0.5

    def test_both_empty(self):
        assert lexical_similarity("", "  ") == 1.0

    def test_case_and_punctuation_insensitive(self):
        assert lexical_similarity("Hello, world!", "hello world") == 1.0

    @given(a=st.text(max_size=30), b=st.text(max_size=30))
    @settings(max_examples=200)
    def test_codomain_and_symmetry(self, a, b):
        s = LexicalSimilarity().similarity(a, b)
        assert 0.0 <= s <= 1.0
        assert s == lexical_similarity(b, a)


class TestPrecomputed:
    def test_from_jsonl(self, tmp_path):
        path = tmp_path / "v.vec.jsonl"
        path.write_text(
            json.dumps({"text": "a", "vector": [1.0, 0.0]})
            + "\n"
            + json.dumps({"text": "b", "vector": [0.0, 1.0]})
            + "\n",
            encoding="utf-8",
        )
        provider = PrecomputedVectors.from_jsonl(path)
        assert provider.similarity("a", "a") == pytest.approx(1.0)
        assert provider.similarity("a", "b") == 0.0

    def test_unknown_text_is_an_error(self):
        provider = PrecomputedVectors({"a": [1.0, 0.0]})
        with pytest.raises(CGError, match="no precomputed vector"):
            provider.similarity("a", "zzz")


def _stub_transport(handler):
    return httpx.MockTransport(handler)


def _vectors_response(vectors):
    return httpx.Response(200, json={"vectors": vectors})


class TestRemote:
    def test_empty_batch_no_request(self):
        def handler(request):  # pragma: no cover - must not be called
            raise AssertionError("no request expected for an empty batch")

        client = RemoteEmbeddings("http://svc", transport=_stub_transport(handler))
        assert client.embed([]) == []

    def test_round_trip(self):
        client = RemoteEmbeddings(
            "http://svc", transport=_stub_transport(lambda r: _vectors_response([[0, 1]]))
        )
        [vec] = client.embed(["x"])
        assert list(vec) == [0.0, 1.0]

    def test_count_mismatch(self):
        client = RemoteEmbeddings(
            "http://svc", transport=_stub_transport(lambda r: _vectors_response([[0, 1], [1, 0]]))
        )
        with pytest.raises(EmbeddingServiceError, match="count mismatch"):
            client.embed(["x"])

    def test_malformed_response(self):
        client = RemoteEmbeddings(
            "http://svc", transport=_stub_transport(lambda r: httpx.Response(200, json={"no": 1}))
        )
        with pytest.raises(EmbeddingServiceError, match="malformed"):
            client.embed(["x"])

    def test_dimension_inconsistency(self):
        client = RemoteEmbeddings(
            "http://svc",
            transport=_stub_transport(lambda r: _vectors_response([[0, 1], [1, 0, 0]])),
        )
        with pytest.raises(EmbeddingServiceError, match="dimension inconsistency"):
            client.embed(["x", "y"])

    def test_cache_transparency(self):
        calls = []

        def handler(request):
            texts = json.loads(request.content)["texts"]
            calls.append(texts)
            return _vectors_response([[1.0, float(len(t))] for t in texts])

        cached = RemoteEmbeddings("http://svc", transport=_stub_transport(handler))
        first = cached.similarity("aa", "bbb")
        second = cached.similarity("aa", "bbb")
        assert first == second
        assert len(calls) == 1  # second call served from cache

        fresh = RemoteEmbeddings("http://svc", transport=_stub_transport(handler))
        assert fresh.similarity("aa", "bbb") == first

    def test_fallback_to_lexical(self):
        def handler(request):
            raise httpx.ConnectError("down")

        client = RemoteEmbeddings(
            "http://svc", transport=_stub_transport(handler), fallback=LexicalSimilarity()
        )
        assert client.similarity("a b", "a b") == 1.0

        strict = RemoteEmbeddings("http://svc", transport=_stub_transport(handler))
        with pytest.raises(EmbeddingServiceError):
            strict.similarity("a b", "a b")
