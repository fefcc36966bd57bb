"""Exception hierarchy.

Every error carries an ``exit_code`` so the command line front end can map
failures onto its stable exit-code contract (2 = input/format problem,
3 = external adapter problem).
"""


class FepaError(Exception):
    exit_code = 1


class InputError(FepaError, ValueError):
    """Malformed or incompatible input data."""

    exit_code = 2

    def __init__(self, message, *, line=None, sentence=None, source=None):
        self.line = line
        self.sentence = sentence
        self.source = source
        self.message = message
        where = []
        if source is not None:
            where.append(str(source))
        if line is not None:
            where.append(f"line {line}")
        if sentence is not None:
            where.append(f"sentence {sentence}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


# corpus readers
class UnbalancedBrackets(InputError):
    pass


class EmptyNode(InputError):
    pass


class MixedTerminalNonterminal(InputError):
    pass


class BadColumnCount(InputError):
    pass


class HeadOutOfRange(InputError):
    pass


class CycleDetected(InputError):
    pass


class MalformedRelation(InputError):
    pass


class MissingAttribute(InputError):
    pass


class DanglingEdgeRef(InputError):
    pass


class LengthMismatch(InputError):
    pass


# metrics
class TokenCountMismatch(InputError):
    pass


class TerminalMismatch(InputError):
    pass


class UnknownRelation(InputError):
    pass


class FormatMismatch(InputError):
    pass


# coverage / mining
class EmptyCorpus(InputError):
    pass


class MissingReferenceGenre(InputError):
    pass


class BadVerdictLine(InputError):
    pass


# robustness
class NotEnoughAlterableWords(InputError):
    pass


class ExhaustedCandidates(InputError):
    pass


class EmptyLevel(InputError):
    pass


class NoCorrections(InputError):
    pass


# profiles
class TooFewProfiles(InputError):
    pass


class AllZeroWeights(InputError):
    pass


# harness
class JudgeConfigError(InputError):
    pass


class AdapterError(FepaError):
    exit_code = 3


class AdapterNotFound(AdapterError):
    pass


class AllSentencesTerminated(AdapterError):
    pass
