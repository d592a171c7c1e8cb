""" Easy access queries and operations against the self-description cache. """

from sqlalchemy import create_engine, select
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from ratingbench.persistence.models import Base, SelfDescription

DESCRIPTION_LIMIT = 300


class DescriptionCache:
    """ A SQLite file (or an in-memory database when no path is given) holding the synthesized
    self-descriptions, keyed by (instance_id, generator model). """

    def __init__(self, path=None):
        if path is None:
            self.engine = create_engine('sqlite://', poolclass=StaticPool,
                                        connect_args={'check_same_thread': False})
        else:
            self.engine = create_engine('sqlite:///' + path,
                                        connect_args={'check_same_thread': False})

        # Make sure the table exists before the first query.
        Base.metadata.create_all(self.engine)
        self.session = sessionmaker(bind=self.engine, expire_on_commit=False)

    def close(self):
        self.engine.dispose()


def get_description(cache, instance_id, generator_model):
    """ Returns the cached SelfDescription, or None. """

    with cache.session() as session:
        return session.scalars(
            select(SelfDescription).
            filter(SelfDescription.instance_id == instance_id).
            filter(SelfDescription.generator_model == generator_model)
        ).first()


def get_all_descriptions(cache, generator_model):
    """ Returns instance_id -> text for every passage generated by generator_model. """

    with cache.session() as session:
        rows = session.scalars(
            select(SelfDescription).
            filter(SelfDescription.generator_model == generator_model).
            order_by(SelfDescription.instance_id)
        ).all()
        return {row.instance_id: row.text for row in rows}


def save_description(cache, instance_id, generator_model, text):
    """ Stores a passage unless one is already cached for the pair; returns the cached entry. The
    first stored passage wins so reruns stay reproducible. """

    existing = get_description(cache, instance_id, generator_model)
    if existing is not None:
        return existing

    description = SelfDescription(
        instance_id=instance_id,
        generator_model=generator_model,
        text=text,
        length=len(text),
        over_limit=len(text) > DESCRIPTION_LIMIT
    )
    with cache.session() as session:
        session.add(description)
        session.commit()

    return description
