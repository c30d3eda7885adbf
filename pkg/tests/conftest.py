"""
Pytest configuration for cpcause tests.
"""

import pytest

from cpcause.api import corpus_path, load_model, load_story, load_theory
from cpcause.config import reset_config


@pytest.fixture(autouse=True)
def fresh_config():
    """Each test starts from the default configuration"""
    reset_config()
    yield
    reset_config()


@pytest.fixture(scope="session")
def pens():
    """The pen vignette: (theory, story)"""
    theory = load_theory(corpus_path("pens.cp"))
    return theory, load_story(corpus_path("pens.story"), theory)


@pytest.fixture(scope="session")
def ex5():
    """a:0.1 <- . / c <- a. / e <- c. / e <- ~a. with the story a, c, e"""
    theory = load_theory(corpus_path("ex5.cp"))
    return theory, load_story(corpus_path("ex5.story"), theory)


@pytest.fixture(scope="session")
def dice():
    """100-throw dice contest where the first throw lands 1"""
    theory = load_theory(corpus_path("dice.cp"))
    return theory, load_story(corpus_path("dice.story"), theory)


@pytest.fixture(scope="session")
def dice6():
    """Dice contest variant whose first throw lands 6 with probability 0.6"""
    theory = load_theory(corpus_path("dice6.cp"))
    return theory, load_story(corpus_path("dice6.story"), theory)


@pytest.fixture(scope="session")
def pen_model():
    return load_model(corpus_path("pen.sm"))


@pytest.fixture(scope="session")
def dice5_model():
    return load_model(corpus_path("dice5.sm"))
