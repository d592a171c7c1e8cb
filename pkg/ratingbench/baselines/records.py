""" Turning baseline predictions into PredictionRecords, so they go through the same aggregation and
reports as the model arms. """

import hashlib

from ratingbench.baselines.average import user_average
from ratingbench.baselines.mf import RatingTriple, predict_mf
from ratingbench.evalmetrics.records import PredictionRecord

USER_AVERAGE = 'user-average'
MATRIX_FACTORIZATION = 'mf'


def training_triples(dataset):
    """ Every in-context rating of every instance; targets are never trained on. """

    return [RatingTriple(record.user_id, record.item_id, record.rating)
            for instance in dataset for record in instance.context]


def mf_predictor(model):
    def predict(instance):
        return predict_mf(model, instance.target.user_id, instance.target.item_id, instance.scale)
    return predict


def baseline_fingerprint(name, detail=''):
    return hashlib.sha256('{}|{}'.format(name, detail).encode('utf-8')).hexdigest()


def baseline_records(dataset, predictor, arm_id=USER_AVERAGE, config_fingerprint=None):
    """ One run-0 record per instance with the predictor's (unrounded) prediction. """

    config_fingerprint = config_fingerprint or baseline_fingerprint(arm_id)
    predictor = predictor or user_average

    return [
        PredictionRecord(
            instance_id=instance.instance_id,
            run_index=0,
            arm_id=arm_id,
            config_fingerprint=config_fingerprint,
            ground_truth=instance.target.rating,
            context_scores=instance.context_scores,
            prediction=float(predictor(instance))
        )
        for instance in dataset
    ]
