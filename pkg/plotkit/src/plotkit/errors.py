"""Error types for the renderer; all map to exit code 2."""


class PlotkitError(Exception):
    exit_code = 2


class MissingColumn(PlotkitError):
    pass


class NoData(PlotkitError):
    pass
