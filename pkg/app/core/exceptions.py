# app/core/exceptions.py


class MoodcastError(Exception):
    """Base error; exit_code plays the role a status code plays in a web service"""

    exit_code: int = 3

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail

    def to_dict(self) -> dict:
        return {
            "error": type(self).__name__,
            "detail": self.detail,
            "exit_code": self.exit_code,
        }


class UsageError(MoodcastError):
    exit_code = 1


class DataError(MoodcastError):
    exit_code = 2


class CorpusFormatError(DataError):
    pass


class LexiconLoadError(DataError):
    pass


class PriceFileError(DataError):
    pass


class ModelFileError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class NumericalError(MoodcastError):
    exit_code = 3


class RankDeficiencyError(NumericalError):
    def __init__(self, column: str):
        super().__init__(f"Design matrix is rank deficient: column '{column}' is collinear with earlier columns")
        self.column = column


class NoNegativeEvidence(NumericalError):
    def __init__(self, day: str):
        super().__init__(f"No negative OF term occurrences on {day}; ratio undefined")
        self.day = day
