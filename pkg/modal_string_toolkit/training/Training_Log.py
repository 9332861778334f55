"""Per-epoch record of a training run, ranked by validation loss"""
import csv
import math
from pathlib import Path
from typing import List, Optional, Union

from sortedcontainers import SortedKeyList

CSV_COLUMNS = ("epoch", "train_loss", "val_loss", "wall_seconds", "diverged_segments")


class Epoch_Record:
    """
        Losses and timing of one epoch. val_loss is None for epochs without validation
    """

    def __init__(self, epoch: int, train_loss: float, val_loss: Optional[float], wall_seconds: float, diverged_segments: int,
                 rollout_val_loss: Optional[float] = None):
        self.epoch: int = epoch
        self.train_loss: float = train_loss
        self.val_loss: Optional[float] = val_loss
        self.wall_seconds: float = wall_seconds
        self.diverged_segments: int = diverged_segments
        self.rollout_val_loss: Optional[float] = rollout_val_loss

    @property
    def validated(self) -> bool:
        return self.val_loss is not None

    def csv_row(self) -> List[str]:
        return [str(self.epoch), repr(self.train_loss), "" if self.val_loss is None else repr(self.val_loss), repr(self.wall_seconds),
                str(self.diverged_segments)]

    def __str__(self):
        val = "-" if self.val_loss is None else f"{self.val_loss:1.4e}"
        return f"Epoch {self.epoch}: train {self.train_loss:1.4e}, val {val}, {self.wall_seconds:1.1f} s, {self.diverged_segments} diverged"

    def __repr__(self):
        return str(self)


class Training_Log:
    """
        Records of every epoch in order, plus the validated epochs ranked by validation loss (earliest first among ties).
        When given a path, every record is appended to a CSV file as it arrives.
    """

    def __init__(self, csv_path: Union[str, Path, None] = None):
        self.records: List[Epoch_Record] = []
        self.ranked: SortedKeyList[Epoch_Record] = SortedKeyList(key=lambda r: (r.val_loss, r.epoch))
        self.csv_path: Optional[Path] = None if csv_path is None else Path(csv_path)
        if self.csv_path is not None:
            with open(self.csv_path, "w", newline="") as csv_file:
                csv.writer(csv_file, lineterminator="\n").writerow(CSV_COLUMNS)

    def append(self, record: Epoch_Record) -> bool:
        """
        :param record: record of the epoch that just finished
        :return: True if the record has the lowest validation loss so far
        """
        self.records.append(record)
        if self.csv_path is not None:
            with open(self.csv_path, "a", newline="") as csv_file:
                csv.writer(csv_file, lineterminator="\n").writerow(record.csv_row())
        if not record.validated or math.isnan(record.val_loss):
            return False
        self.ranked.add(record)
        return self.ranked[0] is record

    @property
    def best(self) -> Optional[Epoch_Record]:
        """
        :return: the validated epoch with the lowest validation loss
        """
        if len(self.ranked) == 0:
            return None
        return self.ranked[0]

    def train_losses(self) -> List[float]:
        return [r.train_loss for r in self.records]

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


def read_training_log(path: Union[str, Path]) -> List[Epoch_Record]:
    """
    :param path: CSV written by a Training_Log
    :return: the records in epoch order
    """
    with open(path, newline="") as csv_file:
        rows = list(csv.DictReader(csv_file))
    return [Epoch_Record(int(row["epoch"]), float(row["train_loss"]), float(row["val_loss"]) if row["val_loss"] else None,
                         float(row["wall_seconds"]), int(row["diverged_segments"])) for row in rows]
