import pytest

from convexcode.code_core import NeuralCode
from convexcode.corpus import corpus

C2_WORDS = "1234 12 2 124 234 134 34 4 345 5 45".split()


@pytest.fixture
def c0():
    return NeuralCode(["12", "23"])


@pytest.fixture
def c1():
    return NeuralCode("1234 123 12 2 23 234".split())


@pytest.fixture
def c2():
    return NeuralCode(C2_WORDS)


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(60, seed=11)
