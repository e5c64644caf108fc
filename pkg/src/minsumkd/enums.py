class Choices:
    """Groups string constants so they can be handed to `click.Choice` and compared to plain
    strings."""

    @classmethod
    def choices(cls):
        return [
            value
            for name, value in vars(cls).items()
            if name.isupper() and isinstance(value, str)
        ]

    def __iter__(self):
        return iter(self.choices())


class JsonOutputFormat(Choices):
    JSON = "JSON"
    RAW = "RAW-JSON"

    def __iter__(self):
        return iter([self.JSON, self.RAW])


class OutputFormat(JsonOutputFormat):
    TABLE = "TABLE"
    CSV = "CSV"

    @classmethod
    def choices(cls):
        return [cls.TABLE, cls.CSV, cls.JSON, cls.RAW]

    def __iter__(self):
        return iter(self.choices())


class DecoderKind(Choices):
    MINSUM = "minsum"
    OFFSET = "offset"
    NEURAL = "neural"
    UNCODED = "uncoded"
    ML = "ml"

    def __iter__(self):
        return iter([self.MINSUM, self.OFFSET, self.NEURAL, self.UNCODED, self.ML])


class SnrConvention(Choices):
    EBNO = "ebno"
    ESNO = "esno"


class OptimizerKind(Choices):
    SGD = "sgd"
    ADAM = "adam"


class SparseVariant(Choices):
    LITERAL = "literal"
    SYMMETRIC = "symmetric"


class LossTerm(Choices):
    CE = "ce"
    KD = "kd"
    SPARSE = "sparse"


class StreamPurpose:
    """Fixed integer keys separating the random streams drawn from one seed."""

    TRAIN = 1
    VALIDATION = 2
    EVAL = 3
    GRADCHECK = 4
    DECODE = 5
