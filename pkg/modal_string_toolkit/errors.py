"""Exceptions raised by the modal string toolkit"""


class Modal_String_Error(Exception):
    """
        Base class of every error raised deliberately by the toolkit
    """


class Invalid_Parameter_Error(Modal_String_Error, ValueError):
    """
        A physical, scaled or positional parameter is outside of its admissible range
    """


class Stability_Error(Invalid_Parameter_Error):
    """
        The time step does not satisfy the stability condition of the scheme
    """

    def __init__(self, message: str, parameters=None):
        super().__init__(message)
        self.parameters = parameters


class Solver_Diverged_Error(Modal_String_Error, ArithmeticError):
    """
        The solver produced a non-finite state
    """

    def __init__(self, step_index: int, quantity: str):
        super().__init__(f"Non-finite {quantity} at step {step_index}")
        self.step_index: int = step_index
        self.quantity: str = quantity


class Undefined_Metric_Error(Modal_String_Error, ValueError):
    """
        A metric was requested for which the reference has no energy or the window is empty
    """


class File_Format_Error(Modal_String_Error, ValueError):
    """
        A binary container has the wrong magic string, an unknown version or a truncated payload
    """


class Dataset_Error(Modal_String_Error, OSError):
    """
        A dataset directory could not be read back
    """


class Missing_Trajectory_Error(Dataset_Error):
    """
        The manifest names a trajectory file that is not in the dataset directory
    """


class Manifest_Hash_Error(Dataset_Error):
    """
        The manifest hash does not match the dataset contents
    """


class Training_Diverged_Error(Modal_String_Error, ArithmeticError):
    """
        Every segment of a training epoch produced a non-finite rollout
    """
