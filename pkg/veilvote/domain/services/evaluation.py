"""
Accuracy of fitted models and of label sequences.
"""
import numpy as np

from veilvote.domain.exceptions import UsageError
from veilvote.domain.models.learner import AgentDataset, Classifier
from veilvote.domain.services.local_learner import predict_labels


def evaluate(model: Classifier, test: AgentDataset) -> float:
    """
    Fraction of test points whose argmax prediction equals the label.

    Args:
        model: Fitted classifier
        test: Labeled test set

    Returns:
        Accuracy in [0, 1]
    """
    if test.size == 0:
        raise UsageError("cannot evaluate on an empty test set")
    return float(np.mean(predict_labels(model, test.features) == test.labels))


def label_accuracy(predicted, truth) -> float:
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if truth.size == 0:
        raise UsageError("no labels to compare")
    return float(np.mean(predicted == truth))
