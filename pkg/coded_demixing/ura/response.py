from django.http import JsonResponse
from rest_framework import status
from rest_framework.exceptions import ValidationError
from rest_framework.views import exception_handler

from coded_demixing.ura.exceptions import DemixingError

GENERAL_ERRORS = ('detail', 'non_field_errors')


def envelope(data=None, status_code=status.HTTP_200_OK, message=None, general_errors=(), form_errors=None):
    """Every API body: status, general and per-field errors, and the payload."""
    data = {} if data is None else data
    if message:
        data['message'] = message
    return {
        'status': status_code,
        'errors': {'general_errors': list(general_errors), 'form_errors': form_errors or {}},
        'data': data,
    }


def api_exception_handler(exc, context):
    # decoding errors are complaints about the submitted scenario
    if isinstance(exc, DemixingError):
        exc = ValidationError({'non_field_errors': [str(exc)]})

    response = exception_handler(exc, context)
    if response is None or not status.is_client_error(response.status_code):
        return response

    form_errors = response.data if isinstance(response.data, dict) else {'non_field_errors': response.data}
    general_errors = []
    for key in GENERAL_ERRORS:
        if key in form_errors:
            errors = form_errors.pop(key)
            general_errors.extend(errors if isinstance(errors, (list, tuple)) else [errors])
    response.data = envelope(status_code=response.status_code, general_errors=general_errors,
                             form_errors=form_errors)
    return response


def handler404(request, exception=None):
    return JsonResponse(envelope(status_code=status.HTTP_404_NOT_FOUND, general_errors=['Not found.']),
                        status=status.HTTP_404_NOT_FOUND)
